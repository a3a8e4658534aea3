//! Pieces shared by the trust-region and cubic-regularization drivers.

use crate::curvature::{nu_floor, probe_negative_curvature, CurvatureProbe, SecondOrderStatus};
use crate::error::Result;
use crate::linalg::norm;
use crate::objective::{BuiltHessian, HessianSource};
use crate::optimality::OptimalityTolerances;
use crate::scalar::{all_finite, Real};
use crate::seed::{derive, Stream};
use crate::trace::{IterationRecord, SolveOutcome, SolveStatus, SolverState};

/// `H_t` with the curvature probe run on it.
pub(crate) struct Prepared<T> {
    pub built: BuiltHessian<T>,
    pub probe: CurvatureProbe<T>,
}

/// Builds `H_t` at `accuracy` and probes it with `ν_t = max(ν, 2K_t/(2K_t + ε_H))`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn prepare<T: Real, S: HessianSource<T> + ?Sized>(
    source: &S,
    x: &[T],
    accuracy: T,
    failure_prob: T,
    nu: T,
    tol: &OptimalityTolerances<T>,
    seed: u64,
    t: usize,
) -> Result<Prepared<T>> {
    let built = source.build(x, accuracy, failure_prob, derive(seed, t, Stream::Sampling))?;
    let nu_t = nu
        .max(nu_floor(built.operator.norm_bound(), tol.eps_h))
        .min(T::one());
    let probe = probe_negative_curvature(
        &built.operator,
        tol.eps_h,
        nu_t,
        failure_prob,
        derive(seed, t, Stream::Curvature),
    )?;
    Ok(Prepared { built, probe })
}

pub(crate) fn is_optimal<T: Real>(
    grad: &[T],
    probe: &CurvatureProbe<T>,
    tol: &OptimalityTolerances<T>,
) -> bool {
    norm(grad) <= tol.eps_g && probe.status() == SecondOrderStatus::Certified
}

pub(crate) fn finite_state<T: Real>(f: T, g: &[T]) -> bool {
    f.is_finite() && all_finite(g)
}

pub(crate) struct Progress<T> {
    pub x: Vec<T>,
    pub param: T,
    pub successes: usize,
    pub failures: usize,
    pub trace: Vec<IterationRecord<T>>,
}

impl<T: Real> Progress<T> {
    pub fn finish(self, status: SolveStatus, message: Option<String>) -> SolveOutcome<T> {
        if let Some(m) = &message {
            log::warn!("solver stopped: {m}");
        }
        SolveOutcome {
            state: SolverState {
                x: self.x,
                radius_or_sigma: self.param,
                successes: self.successes,
                failures: self.failures,
            },
            trace: self.trace,
            status,
            message,
        }
    }

    pub fn terminal_record(
        &mut self,
        t: usize,
        f: T,
        grad: &[T],
        prepared: &Prepared<T>,
        eps_t: T,
    ) {
        self.trace.push(IterationRecord {
            t,
            f_value: f,
            grad_norm: norm(grad),
            lambda_min_estimate: prepared.probe.result.rayleigh,
            radius_or_sigma: self.param,
            rho: None,
            accepted: false,
            sample_size: prepared.built.sample_size,
            step_norm: T::zero(),
            eps_t,
            model_decrease: T::zero(),
        });
    }
}
