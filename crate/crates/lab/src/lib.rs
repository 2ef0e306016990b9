//! File formats, experiment drivers and the command line for `wsf-core`.
//!
//! Experiments are deterministic: sample `i` always draws from its own
//! random stream, so a config produces the same CSV bytes whatever the
//! number of workers.

pub mod cli;
pub mod config;
pub mod driver;
pub mod explore;
pub mod format;
pub mod kirchhoff;
pub mod one_end;
pub mod output;
pub mod tail;
pub mod verify;
