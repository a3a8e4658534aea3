//! Finite-sum objectives, closed-form test functions and data handling.

mod finite_sum;
mod functions;
mod io;
mod loss;
mod synthetic;

pub use finite_sum::{FiniteSumProblem, GlmHessian};
pub use functions::{Quadratic, SaddleQuartic};
pub use io::{
    load_dataset, parse_csv, parse_dataset, parse_svmlight, to_csv_string, write_csv, DataFormat,
};
pub use loss::{biweight_scalar, nls_logistic_scalar, sigmoid, Loss, ScalarLoss};
pub use synthetic::{generate_synthetic, SyntheticConfig};
