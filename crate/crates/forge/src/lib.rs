//! Corpus IO, file formats, multi-threaded drivers and the command-line front
//! end for `pseudo-forge-core`.

pub mod cli;
pub mod config;
pub mod formats;
pub mod io;
pub mod parallel;
pub mod sweep;

pub use cli::execute;
