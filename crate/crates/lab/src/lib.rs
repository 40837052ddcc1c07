//! Artifact side of the quantum modular form toolkit: CSV/JSON formats,
//! configuration, figure data, SVG output, the acceptance checks and the
//! `qmf` command line.

pub mod checks;
pub mod cli;
pub mod compute;
pub mod config;
pub mod figures;
pub mod io;
pub mod parallel;
pub mod svg;
