//! Experiment harness for the inexact-Hessian trust-region and cubic
//! regularization solvers: TOML configs, CSV traces, sampling-bound
//! verification and exact-versus-sampled comparisons.

pub mod compare;
pub mod config;
pub mod error;
pub mod problem;
pub mod run;
pub mod verify;

pub use compare::{compare_exact_vs_sampled, CompareReport};
pub use config::ExperimentConfig;
pub use error::{exit, HarnessError};
pub use run::{run_experiment, RunReport};
pub use verify::{verify_bounds, VerifyReport};
