//! Recomputation of the sufficient-descent inequalities.

use super::cubic::{arc_cauchy_step, arc_eigen_step};
use super::{CubicModel, SubproblemSolution, TRModel};
use crate::linalg::{dot, norm};
use crate::scalar::Real;

/// One inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate<T> {
    pub lhs: T,
    pub rhs: T,
    /// `lhs − rhs`
    pub slack: T,
    pub met: bool,
}

impl<T: Real> Certificate<T> {
    pub fn new(lhs: T, rhs: T) -> Self {
        let slack = lhs - rhs;
        let allowance = T::CERT_TOL * (T::one() + lhs.abs() + rhs.abs());
        Self {
            lhs,
            rhs,
            slack,
            met: slack >= -allowance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Certificates<T> {
    /// Cauchy decrease; absent when the gradient is zero.
    pub cauchy: Option<Certificate<T>>,
    /// Eigen decrease; absent without a negative-curvature direction.
    pub eigen: Option<Certificate<T>>,
    /// `‖∇m(s)‖ ≤ ζ max{‖s‖², θ‖g‖}`; only computed for the progressive solver.
    pub model_gradient: Option<Certificate<T>>,
}

impl<T: Real> Certificates<T> {
    pub fn all_met(&self) -> bool {
        [self.cauchy, self.eigen, self.model_gradient]
            .iter()
            .flatten()
            .all(|c| c.met)
    }
}

fn realized_curvature<T: Real>(hu: &[T], u: &[T]) -> T {
    -dot(u, hu) / dot(u, u)
}

/// Recomputes the trust-region certificates of `solution` for `model`.
///
/// Cauchy: `−m(s) ≥ ½‖g‖ min{‖g‖/(1 + K_H), Δ}`.
/// Eigen: `−m(s) ≥ ½ ν̂ Δ²` with `ν̂ = −⟨u,Hu⟩/‖u‖²`.
pub fn certify_tr<T: Real>(
    model: &TRModel<'_, T>,
    solution: &SubproblemSolution<T>,
    eigen_direction: Option<&[T]>,
) -> Certificates<T> {
    let decrease = -model.value(&solution.step);
    let gn = norm(model.grad);
    let k = model.hessian.norm_bound();
    let cauchy = (gn > T::zero()).then(|| {
        let rhs = T::half() * gn * (gn / (T::one() + k)).min(model.radius);
        Certificate::new(decrease, rhs)
    });
    let eigen = eigen_direction.map(|u| {
        let nu_hat = realized_curvature(&model.hessian.apply(u), u);
        Certificate::new(decrease, T::half() * nu_hat * model.radius * model.radius)
    });
    Certificates {
        cauchy,
        eigen,
        model_gradient: None,
    }
}

/// Recomputes the cubic-model certificates of `solution` for `model`.
///
/// Cauchy: `−m(s) ≥ max{ (1/12)‖s^C‖²(√(K²+4σ‖g‖) − K), (‖g‖/(2√3)) min{‖g‖/K, √(‖g‖/σ)} }`
/// where `‖g‖/K` is dropped when `K = 0`.
/// Eigen: `−m(s) ≥ (ν̂/6) max{‖s^E‖², ν̂²/σ²}`.
/// Model gradient (when `zeta` is given): `ζ max{‖s‖², min(1,‖s‖)‖g‖} ≥ ‖∇m(s)‖`.
pub fn certify_arc<T: Real>(
    model: &CubicModel<'_, T>,
    solution: &SubproblemSolution<T>,
    eigen_direction: Option<&[T]>,
    zeta: Option<T>,
) -> Certificates<T> {
    let decrease = -model.value(&solution.step);
    let gn = norm(model.grad);
    let k = model.hessian.norm_bound();
    let sigma = model.sigma;
    let cauchy = (gn > T::zero()).then(|| {
        let sc = norm(&arc_cauchy_step(model));
        let surd = (k * k + T::lit(4.0) * sigma * gn).sqrt() - k;
        let first = sc * sc * surd / T::lit(12.0);
        let root = (gn / sigma).sqrt();
        let inner = if k > T::zero() {
            (gn / k).min(root)
        } else {
            root
        };
        let second = gn / (T::two() * T::lit(3.0).sqrt()) * inner;
        Certificate::new(decrease, first.max(second))
    });
    let eigen = eigen_direction.and_then(|u| {
        let se = arc_eigen_step(model, u).ok()?;
        let nu_hat = realized_curvature(&model.hessian.apply(u), u);
        let ns = norm(&se);
        let rhs = nu_hat / T::lit(6.0) * (ns * ns).max(nu_hat * nu_hat / (sigma * sigma));
        Some(Certificate::new(decrease, rhs))
    });
    let model_gradient = zeta.map(|z| {
        let ns = solution.step_norm();
        let theta = T::one().min(ns);
        let bound = z * (ns * ns).max(theta * gn);
        Certificate::new(bound, norm(&model.gradient(&solution.step)))
    });
    Certificates {
        cauchy,
        eigen,
        model_gradient,
    }
}
