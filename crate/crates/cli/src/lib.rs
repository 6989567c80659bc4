//! Config-driven front end of the `matlip` library.

pub mod config;
pub mod records;
pub mod tasks;
