//! Objective oracles and the sources of Hessian approximations.

use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::operator::HessianOperator;
use crate::scalar::Real;
use crate::subproblem::SubproblemSolution;

/// Exact `F`, `∇F` and Hessian at a point.
pub trait Objective<T: Real>: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T {
        self.value_grad(x).0
    }

    fn value_grad(&self, x: &[T]) -> (T, Vec<T>);

    /// Exact Hessian operator with a valid norm bound.
    fn hessian(&self, x: &[T]) -> HessianOperator<T>;

    fn dense_hessian(&self, x: &[T]) -> DenseMatrix<T> {
        self.hessian(x).densify()
    }

    /// Scalar-Hessian evaluations needed by one exact Hessian (the cost proxy).
    fn hessian_cost(&self) -> usize {
        1
    }
}

/// A Hessian approximation together with what it promises.
#[derive(Debug, Clone)]
pub struct BuiltHessian<T> {
    pub operator: HessianOperator<T>,
    /// Accuracy `ε` the operator was built for; zero for exact operators.
    pub accuracy: T,
    /// `|S|` for sampled operators, the number of terms for exact ones.
    pub sample_size: usize,
    /// Scalar-Hessian evaluations spent.
    pub cost: usize,
}

/// Produces `H(x)` with `‖H − ∇²F(x)‖ ≤ ε` with probability at least `1 − δ`.
pub trait HessianSource<T: Real>: Sync {
    fn build(&self, x: &[T], accuracy: T, failure_prob: T, seed: u64) -> Result<BuiltHessian<T>>;

    /// The `K_H` the operators built for `accuracy` will carry, if known in advance.
    fn norm_bound_hint(&self, accuracy: T) -> Option<T>;
}

/// Always returns the exact Hessian of the objective.
pub struct ExactHessian<'a, O: ?Sized>(pub &'a O);

impl<T: Real, O: Objective<T> + ?Sized> HessianSource<T> for ExactHessian<'_, O> {
    fn build(
        &self,
        x: &[T],
        _accuracy: T,
        _failure_prob: T,
        _seed: u64,
    ) -> Result<BuiltHessian<T>> {
        let cost = self.0.hessian_cost();
        Ok(BuiltHessian {
            operator: self.0.hessian(x),
            accuracy: T::zero(),
            sample_size: cost,
            cost,
        })
    }

    fn norm_bound_hint(&self, _accuracy: T) -> Option<T> {
        None
    }
}

/// Everything a solver knew when it produced one step; passed to observers.
#[derive(Debug)]
pub struct StepView<'a, T> {
    pub t: usize,
    pub x: &'a [T],
    pub grad: &'a [T],
    pub hessian: &'a HessianOperator<T>,
    /// `Δ_t` or `σ_t`.
    pub radius_or_sigma: T,
    pub solution: &'a SubproblemSolution<T>,
    pub f_old: T,
    pub f_new: T,
    pub accepted: bool,
}
