//! Trust-region and adaptive cubic regularization methods for non-convex
//! problems with inexact Hessians.
//!
//! The solvers only require a Hessian operator `H` with
//! `‖(H − ∇²F)s‖ ≤ ε‖s‖` at a requested accuracy `ε`, which makes them
//! suited to randomly sub-sampled Hessians of finite-sum objectives.
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cubic_reg;
pub mod curvature;
mod driver;
pub mod error;
pub mod linalg;
pub mod objective;
pub mod operator;
pub mod optimality;
pub mod point;
pub mod problems;
pub mod sampling;
pub mod scalar;
mod seed;
pub mod subproblem;
pub mod trace;
pub mod trust_region;

pub use cubic_reg::{
    arc_epsilon, estimate_hessian_lipschitz, run_arc, run_arc_observed, ARCConfig, ArcMode,
};
pub use curvature::{
    lanczos_budget, lanczos_extreme, negative_curvature_direction, nu_floor,
    probe_negative_curvature, CurvatureProbe, CurvatureResult, SecondOrderStatus,
};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, SymmetricEigen};
pub use objective::{BuiltHessian, ExactHessian, HessianSource, Objective, StepView};
pub use operator::{HessianOperator, LinearOperator, Provenance};
pub use optimality::{
    acceptance_ratio, check_first_order, check_second_order, OptimalityTolerances, ProbeSettings,
};
pub use point::Point;
pub use problems::{FiniteSumProblem, Loss};
pub use sampling::{SampleMode, SampleScheme, SubsampledHessian};
pub use scalar::Real;
pub use subproblem::{CubicModel, SubproblemSolution, TRModel};
pub use trace::{IterationRecord, SolveOutcome, SolveStatus, SolverState};
pub use trust_region::{run_tr, run_tr_observed, tr_tolerance, TRConfig};

pub type Point64 = Point<f64>;
pub type HessianOperator64 = HessianOperator<f64>;
pub type DenseMatrix64 = DenseMatrix<f64>;
pub type OptimalityTolerances64 = OptimalityTolerances<f64>;
pub type FiniteSumProblem64 = FiniteSumProblem<f64>;
pub type SampleScheme64 = SampleScheme<f64>;
pub type TRConfig64 = TRConfig<f64>;
pub type ARCConfig64 = ARCConfig<f64>;
pub type IterationRecord64 = IterationRecord<f64>;
pub type SolveOutcome64 = SolveOutcome<f64>;
pub type SubproblemSolution64 = SubproblemSolution<f64>;
