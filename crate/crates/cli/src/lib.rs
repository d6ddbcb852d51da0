//! Command-line front end for `stpart`: formula text, reports, plots and verification suites.

pub mod commands;
pub mod config;
pub mod parse;
pub mod plot;
pub mod report;
pub mod suite;

pub use commands::{render, run, Cli, Cmd, Format, Output, RunError};
pub use config::Config;
pub use report::{Certificate, RunReport, Verdict};
