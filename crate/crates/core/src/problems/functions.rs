//! Small closed-form test objectives.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_spectral_norm, DenseMatrix};
use crate::objective::Objective;
use crate::operator::{DenseOperator, HessianOperator, Provenance};
use crate::scalar::Real;

/// `F(x) = ½xᵀAx + bᵀx` with symmetric `A`.
#[derive(Debug, Clone)]
pub struct Quadratic<T> {
    a: DenseMatrix<T>,
    b: Vec<T>,
    norm: T,
}

impl<T: Real> Quadratic<T> {
    pub fn new(mut a: DenseMatrix<T>, b: Vec<T>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        a.symmetrize();
        let norm = symmetric_spectral_norm(&a);
        Ok(Self { a, b, norm })
    }

    /// `F(x) = ½‖x‖²`
    pub fn isotropic(d: usize) -> Self {
        Self::new(DenseMatrix::identity(d), vec![T::zero(); d]).expect("consistent sizes")
    }
}

impl<T: Real> Objective<T> for Quadratic<T> {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value_grad(&self, x: &[T]) -> (T, Vec<T>) {
        let ax = self.a.matvec(x);
        let value = T::half() * dot(x, &ax) + dot(&self.b, x);
        let grad = ax.iter().zip(&self.b).map(|(&p, &q)| p + q).collect();
        (value, grad)
    }

    fn hessian(&self, _x: &[T]) -> HessianOperator<T> {
        HessianOperator::new(
            Arc::new(DenseOperator::new(self.a.clone())),
            self.norm,
            Provenance::Exact,
        )
    }
}

/// `F(x, y) = x⁴/4 − x²/2 + y²/2`.
///
/// Stationary points: a strict saddle at the origin (Hessian `diag(−1, 1)`)
/// and the two global minimizers `(±1, 0)` with `F = −1/4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SaddleQuartic;

impl SaddleQuartic {
    /// Lipschitz constant of `∇²F` on the box `|x| ≤ r`: `6r`.
    pub fn hessian_lipschitz<T: Real>(r: T) -> T {
        T::lit(6.0) * r
    }
}

impl<T: Real> Objective<T> for SaddleQuartic {
    fn dim(&self) -> usize {
        2
    }

    fn value_grad(&self, x: &[T]) -> (T, Vec<T>) {
        let (p, q) = (x[0], x[1]);
        let p2 = p * p;
        let value = p2 * p2 / T::lit(4.0) - p2 * T::half() + q * q * T::half();
        (value, vec![p2 * p - p, q])
    }

    fn hessian(&self, x: &[T]) -> HessianOperator<T> {
        let hxx = T::lit(3.0) * x[0] * x[0] - T::one();
        let m = DenseMatrix::diagonal(&[hxx, T::one()]);
        HessianOperator::new(
            Arc::new(DenseOperator::new(m)),
            hxx.abs().max(T::one()),
            Provenance::Exact,
        )
    }
}
