//! Experiment harness for the SGD, ADAM and MAS optimizers: deterministic
//! runs, multi-seed grids, trajectory comparison, file formats, plotting and
//! the `mas` command line.

pub mod cli;
pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod format;
pub mod grid;
pub mod plot;
pub mod run;
pub mod spec;

pub use compare::{compare_trajectories, CompareReport};
pub use config::ExperimentConfig;
pub use error::{ConfigError, FormatError, HarnessError};
pub use experiment::{run_experiment, write_outputs, Experiment};
pub use grid::{run_grid, run_groups, GridOutcome, RunGroup, SummaryRow, GRID_LAMBDAS};
pub use run::{run_single, Metric, RunTrace, TraceRecord};
pub use spec::{HyperParams, ProblemSpec, RunSpec};
