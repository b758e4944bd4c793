//! File formats, exporters and the command-line front end for `hav-core`.

pub mod cli;
pub mod dot;
pub mod json;
pub mod textfmt;

pub use hav_core as core;
