//! Batch front end: configuration, the experiment grid, reports and
//! surrogate data generation.

pub mod config;
pub mod grid;
pub mod manifest;
pub mod report;
pub mod tools;

pub use config::RunConfig;
pub use grid::{run, RunOutcome};
pub use report::render;
