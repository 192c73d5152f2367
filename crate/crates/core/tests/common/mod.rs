//! Shared helpers for the integration tests: independent oracle
//! implementations that deliberately avoid the library's own code paths.

#![allow(dead_code)] // each test binary uses its own subset

pub mod features_oracle;
