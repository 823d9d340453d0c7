//! Command-line driver for `scpdc-core`: problem files, generators, solve
//! runs with CSV traces, stationarity checks and batch suites.

pub mod bench;
pub mod cli;
pub mod error;
pub mod format;
pub mod run;
pub mod source;
pub mod trace;
