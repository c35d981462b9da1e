//! Library half of the benchmark harness; the `apqaoa` binary is a thin
//! dispatcher over these modules.

pub mod aggregate;
pub mod config;
pub mod records;
pub mod suite;
