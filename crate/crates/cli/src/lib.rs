//! Dataset formats, result files, and run reports for the `hausp` binary.

pub mod dataset;
pub mod report;
pub mod results;
