//! Sub-problem solvers for the trust-region and cubic models.
//!
//! Every solver returns a [`SubproblemSolution`] whose certificates can be
//! recomputed from the step and the model alone (see [`certify_tr`] and
//! [`certify_arc`]).

mod certify;
mod cubic;
mod reduced;
mod trust;

pub use certify::{certify_arc, certify_tr, Certificate, Certificates};
pub use cubic::{
    arc_cauchy_point, arc_eigen_point, arc_progressive_solve, arc_subspace_solve,
    solve_arc_subproblem,
};
pub use reduced::{solve_reduced_cubic, solve_reduced_trust_region, ReducedSolution};
pub use trust::{solve_tr_subproblem, tr_cauchy_point, tr_eigen_point, tr_subspace_solve};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, DenseMatrix};
use crate::operator::HessianOperator;
use crate::scalar::{all_finite, Real};

/// `m(s) = ⟨g,s⟩ + ½⟨s,Hs⟩` restricted to `‖s‖ ≤ Δ`.
#[derive(Debug, Clone, Copy)]
pub struct TRModel<'a, T> {
    pub grad: &'a [T],
    pub hessian: &'a HessianOperator<T>,
    pub radius: T,
}

/// `m(s) = ⟨g,s⟩ + ½⟨s,Hs⟩ + (σ/3)‖s‖³`.
#[derive(Debug, Clone, Copy)]
pub struct CubicModel<'a, T> {
    pub grad: &'a [T],
    pub hessian: &'a HessianOperator<T>,
    pub sigma: T,
}

fn validate_common<T: Real>(grad: &[T], hessian: &HessianOperator<T>) -> Result<()> {
    if grad.len() != hessian.dim() {
        return Err(Error::DimensionMismatch {
            expected: hessian.dim(),
            got: grad.len(),
        });
    }
    if !all_finite(grad) {
        return Err(Error::InvalidInput(
            "model gradient has non-finite entries".into(),
        ));
    }
    Ok(())
}

impl<'a, T: Real> TRModel<'a, T> {
    pub fn new(grad: &'a [T], hessian: &'a HessianOperator<T>, radius: T) -> Result<Self> {
        validate_common(grad, hessian)?;
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            grad,
            hessian,
            radius,
        })
    }

    pub fn value(&self, s: &[T]) -> T {
        self.value_with_image(s, &self.hessian.apply(s))
    }

    fn value_with_image(&self, s: &[T], hs: &[T]) -> T {
        dot(self.grad, s) + T::half() * dot(s, hs)
    }

    /// `∇m(s) = g + Hs`
    pub fn gradient(&self, s: &[T]) -> Vec<T> {
        let mut out = self.hessian.apply(s);
        axpy(T::one(), self.grad, &mut out);
        out
    }
}

impl<'a, T: Real> CubicModel<'a, T> {
    pub fn new(grad: &'a [T], hessian: &'a HessianOperator<T>, sigma: T) -> Result<Self> {
        validate_common(grad, hessian)?;
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            grad,
            hessian,
            sigma,
        })
    }

    pub fn value(&self, s: &[T]) -> T {
        self.value_with_image(s, &self.hessian.apply(s))
    }

    fn value_with_image(&self, s: &[T], hs: &[T]) -> T {
        let ns = norm(s);
        dot(self.grad, s) + T::half() * dot(s, hs) + self.sigma / T::lit(3.0) * ns * ns * ns
    }

    /// `∇m(s) = g + Hs + σ‖s‖s`
    pub fn gradient(&self, s: &[T]) -> Vec<T> {
        let mut out = self.hessian.apply(s);
        axpy(T::one(), self.grad, &mut out);
        axpy(self.sigma * norm(s), s, &mut out);
        out
    }
}

/// Which candidate produced the returned step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Cauchy,
    Eigen,
    Subspace,
}

#[derive(Debug, Clone)]
pub struct SubproblemSolution<T> {
    pub step: Vec<T>,
    pub model_value: T,
    /// `‖∇m(s)‖` of the model the step was computed for.
    pub model_grad_norm: T,
    pub certificates: Certificates<T>,
    /// Dimension of the search space (1 for Cauchy and Eigen points).
    pub subspace_dim: usize,
    pub kind: StepKind,
    /// Negative-curvature direction `u` the eigen certificate refers to.
    pub eigen_direction: Option<Vec<T>>,
}

impl<T: Real> SubproblemSolution<T> {
    /// `−m(s)`
    pub fn model_decrease(&self) -> T {
        -self.model_value
    }

    pub fn step_norm(&self) -> T {
        norm(&self.step)
    }
}

/// Orthonormal basis `U` together with the images `HU`.
pub(crate) struct Subspace<T> {
    basis: Vec<Vec<T>>,
    images: Vec<Vec<T>>,
}

impl<T: Real> Subspace<T> {
    pub(crate) fn new() -> Self {
        Self {
            basis: Vec::new(),
            images: Vec::new(),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonalizes `v` against the basis and appends it unless it is
    /// numerically dependent. Returns whether the basis grew.
    pub(crate) fn push(&mut self, h: &HessianOperator<T>, v: &[T]) -> bool {
        let original = norm(v);
        if !(original > T::zero()) || !original.is_finite() {
            return false;
        }
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let residual = norm(&w);
        if residual <= T::RANK_TOL * original {
            return false;
        }
        let q: Vec<T> = w.iter().map(|&x| x / residual).collect();
        self.images.push(h.apply(&q));
        self.basis.push(q);
        true
    }

    pub(crate) fn last_image(&self) -> Option<&[T]> {
        self.images.last().map(Vec::as_slice)
    }

    /// `(UᵀHU, Uᵀg)`
    pub(crate) fn reduce(&self, g: &[T]) -> (DenseMatrix<T>, Vec<T>) {
        let p = self.dim();
        let mut b = DenseMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                b[(i, j)] = dot(&self.basis[i], &self.images[j]);
            }
        }
        b.symmetrize();
        let gr = self.basis.iter().map(|q| dot(q, g)).collect();
        (b, gr)
    }

    /// `U v`
    pub(crate) fn lift(&self, v: &[T]) -> Vec<T> {
        let d = self.basis.first().map_or(0, Vec::len);
        let mut s = vec![T::zero(); d];
        for (c, q) in v.iter().zip(&self.basis) {
            axpy(*c, q, &mut s);
        }
        s
    }
}

/// Picks the lowest model value. The subspace solution is the default;
/// a seed replaces it only when strictly lower, with Eigen tried before
/// Cauchy so that ties between the two go to Eigen.
pub(crate) fn select_best<T: Real>(
    subspace: SubproblemSolution<T>,
    eigen: Option<SubproblemSolution<T>>,
    cauchy: Option<SubproblemSolution<T>>,
) -> SubproblemSolution<T> {
    let mut best = subspace;
    for candidate in [eigen, cauchy].into_iter().flatten() {
        if candidate.model_value < best.model_value {
            best = candidate;
        }
    }
    best
}
