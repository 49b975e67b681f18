//! Case files, result cache, reports and subcommands for the `hilbertforge` binary.

pub mod builtin;
pub mod cache;
pub mod casefile;
pub mod commands;
pub mod report;

pub use commands::run;
