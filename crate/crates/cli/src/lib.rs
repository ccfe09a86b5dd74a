//! Library surface of the CLI crate: file formats, configuration,
//! experiment and benchmark runners, and the data-rate calculator. The
//! `tqc` binary is a thin argument-parsing shell over these modules.

pub mod bench;
pub mod config;
pub mod experiment;
pub mod format;
pub mod rate;
pub mod replay;
