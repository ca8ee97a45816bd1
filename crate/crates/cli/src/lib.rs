//! File formats, synthetic cohorts, reports and plots around
//! [`ctgfeat_core`], plus the command implementations behind the `ctgfeat`
//! binary.

pub mod commands;
pub mod io;
pub mod report;
pub mod svg;
pub mod synth;

pub use commands::CliError;
