//! Benchmark harness for the capped-cone projection and the sparse
//! regression solvers.
//!
//! Four commands, each writing seeded, reproducible CSVs plus a config echo
//! into its own subdirectory of the output directory:
//!
//! - `proj-bench`: timed batch projections of random points with
//!   infeasibility and certificate-gap statistics per batch size,
//! - `reg-solve`: one solver run on a synthetic or CSV-loaded regression
//!   instance, with a convergence trace and a summary row,
//! - `group-solve`: the same under consecutive equal sparsity groups,
//! - `trace`: all four method/step combinations on one instance, one trace
//!   file each.
//!
//! Everything except wall-clock columns is a pure function of (config,
//! seed).

pub mod commands;
pub mod config;
pub mod instance;

pub use config::{Command, MethodOpt, Overrides, RunConfig, StepOpt};

/// Harness-level failure: bad configuration, I/O, CSV shape, or an error
/// bubbled up from the math library.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] caprsoc::Error),
}

impl BenchError {
    /// Stable tag for the machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            BenchError::Config(_) => "config",
            BenchError::Io(_) => "io",
            BenchError::Csv(_) => "csv",
            BenchError::Core(_) => "solver",
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
