//! Negative-curvature directions by Lanczos on the shifted operator `K_H·I − H`.
//!
//! A Ritz vector for the top of the spectrum of `K_H·I − H` is a Ritz vector
//! for the bottom of the spectrum of `H`. Working with the shifted operator keeps
//! the iteration positive semidefinite, matching the standard randomized
//! Lanczos guarantee for the largest eigenvalue.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, scaled, DenseMatrix, SymmetricEigen};
use crate::operator::{gaussian_vector, HessianOperator};
use crate::scalar::Real;

/// Iterations below which Ritz convergence is tested on every step.
const DENSE_CHECK_LIMIT: usize = 16;
/// Spacing of the Ritz convergence test past `DENSE_CHECK_LIMIT`.
const CHECK_STRIDE: usize = 4;
/// Floor on the Lanczos budget so that small problems always run to exhaustion.
const MIN_BUDGET_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureResult<T> {
    /// Unit-norm direction `u`.
    pub direction: Vec<T>,
    /// `⟨u, Hu⟩`, recomputed from the stored `u`.
    pub rayleigh: T,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Outcome of a termination-grade curvature check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondOrderStatus {
    /// No direction with `⟨u,Hu⟩ ≤ −ν·ε_H` exists as far as a converged probe can tell.
    Certified,
    /// A direction with `⟨u,Hu⟩ ≤ −ν·ε_H` was found.
    NegativeCurvature,
    /// The probe ran out of budget without finding such a direction.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct CurvatureProbe<T> {
    pub result: CurvatureResult<T>,
    pub nu: T,
    /// `−ν·ε_H`
    pub threshold: T,
}

impl<T: Real> CurvatureProbe<T> {
    pub fn found(&self) -> bool {
        self.result.rayleigh <= self.threshold
    }

    pub fn status(&self) -> SecondOrderStatus {
        if self.found() {
            SecondOrderStatus::NegativeCurvature
        } else if self.result.converged {
            SecondOrderStatus::Certified
        } else {
            SecondOrderStatus::Inconclusive
        }
    }

    pub fn direction(&self) -> Option<&CurvatureResult<T>> {
        self.found().then_some(&self.result)
    }
}

/// Smallest admissible `ν = 2K_H/(2K_H + ε_H)`.
pub fn nu_floor<T: Real>(norm_bound: T, eps_h: T) -> T {
    let two_k = T::two() * norm_bound;
    two_k / (two_k + eps_h)
}

/// `⌈ln(d/δ)·√(K_H/κ)⌉`, at least one.
pub fn lanczos_budget<T: Real>(d: usize, kappa: T, delta: T, norm_bound: T) -> usize {
    let d = T::from_usize(d).unwrap_or_else(T::max_value);
    let raw = (d / delta).ln() * (norm_bound / kappa).sqrt();
    raw.ceil().to_usize().unwrap_or(usize::MAX).max(1)
}

fn check_unit_interval<T: Real>(name: &str, value: T) -> Result<()> {
    if !(value > T::zero() && value < T::one()) {
        return Err(Error::Config(format!(
            "{name} must lie in (0, 1), got {value}"
        )));
    }
    Ok(())
}

/// Randomized Lanczos with full reorthogonalization for the bottom of the spectrum of `H`.
///
/// `kappa` and `delta` only enter the contract of the caller's budget; the
/// iteration itself stops on Ritz convergence, on an invariant Krylov
/// subspace, or after `max_matvecs` products.
pub fn lanczos_extreme<T: Real>(
    h: &HessianOperator<T>,
    kappa: T,
    delta: T,
    max_matvecs: usize,
    seed: u64,
) -> Result<CurvatureResult<T>> {
    check_unit_interval("kappa", kappa)?;
    check_unit_interval("delta", delta)?;
    let d = h.dim();
    if d == 0 {
        return Err(Error::InvalidInput("operator has dimension zero".into()));
    }
    let k = h.norm_bound();
    let breakdown = T::RANK_TOL * k.max(T::min_positive_value());
    let ritz_tol = T::RITZ_TOL * k;
    let max_steps = max_matvecs.max(1).min(d);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = gaussian_vector::<T>(&mut rng, d);
    let mut q: Vec<Vec<T>> = vec![scaled(T::one() / norm(&start), &start)];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut hv = vec![T::zero(); d];
    let mut converged = false;
    let mut ritz: Option<Vec<T>> = None;

    for j in 0..max_steps {
        // w = (K·I − H) q_j
        h.apply_into(&q[j], &mut hv);
        let mut w: Vec<T> = q[j].iter().zip(&hv).map(|(&qi, &hi)| k * qi - hi).collect();
        let alpha = dot(&q[j], &w);
        axpy(-alpha, &q[j], &mut w);
        if j > 0 {
            axpy(-betas[j - 1], &q[j - 1], &mut w);
        }
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &w);
                axpy(-c, qi, &mut w);
            }
        }
        alphas.push(alpha);
        let beta = norm(&w);
        let steps = j + 1;
        let exhausted = beta <= breakdown || steps == d;
        let last = exhausted || steps == max_steps;
        if last || steps <= DENSE_CHECK_LIMIT || steps % CHECK_STRIDE == 0 {
            let (y, residual) = top_ritz_pair(&alphas, &betas, beta);
            if exhausted || residual <= ritz_tol {
                converged = true;
            }
            if converged || last {
                ritz = Some(y);
                break;
            }
        }
        betas.push(beta);
        q.push(scaled(T::one() / beta, &w));
    }

    let y = ritz.expect("Lanczos loop always produces a Ritz vector");
    let mut u = vec![T::zero(); d];
    for (coef, qi) in y.iter().zip(&q) {
        axpy(*coef, qi, &mut u);
    }
    let u = scaled(T::one() / norm(&u), &u);
    let rayleigh = h.quad_form(&u);
    Ok(CurvatureResult {
        direction: u,
        rayleigh,
        iterations_used: alphas.len(),
        converged,
    })
}

/// Top eigenvector of the Lanczos tridiagonal and its Ritz residual `β·|y_last|`.
fn top_ritz_pair<T: Real>(alphas: &[T], betas: &[T], beta_next: T) -> (Vec<T>, T) {
    let m = alphas.len();
    let mut t = DenseMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(&t);
    let y = eig.vector(m - 1);
    let residual = beta_next * y[m - 1].abs();
    (y, residual)
}

/// Runs the probe with `κ = ν/2` and reports whether `⟨u,Hu⟩ ≤ −ν·ε_H`.
///
/// The budget is the larger of the randomized Lanczos bound and `min(d, 200)`.
pub fn probe_negative_curvature<T: Real>(
    h: &HessianOperator<T>,
    eps_h: T,
    nu: T,
    delta: T,
    seed: u64,
) -> Result<CurvatureProbe<T>> {
    if !(eps_h > T::zero()) {
        return Err(Error::Config(format!(
            "eps_H must be positive, got {eps_h}"
        )));
    }
    let floor = nu_floor(h.norm_bound(), eps_h);
    if !(nu > T::zero() && nu <= T::one()) {
        return Err(Error::Config(format!("nu must lie in (0, 1], got {nu}")));
    }
    if nu < floor * (T::one() - T::epsilon() * T::lit(16.0)) {
        return Err(Error::Config(format!(
            "nu = {nu} is below 2K_H/(2K_H + eps_H) = {floor}"
        )));
    }
    // κ = ν/2 ≤ 1/2 stays inside (0, 1).
    let kappa = nu * T::half();
    let budget =
        lanczos_budget(h.dim(), kappa, delta, h.norm_bound()).max(h.dim().min(MIN_BUDGET_CAP));
    let result = lanczos_extreme(h, kappa, delta, budget, seed)?;
    Ok(CurvatureProbe {
        result,
        nu,
        threshold: -(nu * eps_h),
    })
}

/// Returns a direction with `⟨u,Hu⟩ ≤ −ν·ε_H`, or `None` if the probe found none.
pub fn negative_curvature_direction<T: Real>(
    h: &HessianOperator<T>,
    eps_h: T,
    nu: T,
    delta: T,
    seed: u64,
) -> Result<Option<CurvatureResult<T>>> {
    let probe = probe_negative_curvature(h, eps_h, nu, delta, seed)?;
    Ok(probe.direction().cloned())
}
