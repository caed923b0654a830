//! File formats and experiment harness for the `ppft` command-line tool.

pub mod format;
pub mod harness;
