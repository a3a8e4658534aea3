//! Trust-region Newton iteration with an inexact Hessian.

use crate::driver::{finite_state, is_optimal, prepare, Prepared, Progress};
use crate::error::{Error, Result};
use crate::linalg::{add, norm};
use crate::objective::{HessianSource, Objective, StepView};
use crate::optimality::{acceptance_ratio, OptimalityTolerances};
use crate::point::Point;
use crate::sampling::{per_iteration_delta, DeltaSchedule};
use crate::scalar::Real;
use crate::subproblem::{solve_tr_subproblem, TRModel};
use crate::trace::{IterationRecord, SolveOutcome, SolveStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct TRConfig<T> {
    /// `Δ₀`
    pub delta0: T,
    pub eta: T,
    pub gamma: T,
    pub alpha: T,
    /// Floor on the curvature-probe parameter; raised per iteration to `2K_t/(2K_t + ε_H)`.
    pub nu: T,
    pub tol: OptimalityTolerances<T>,
    pub max_iters: usize,
    /// Overall failure probability, split across iterations for sampled Hessians.
    pub delta_total: T,
    /// Reuse `H_t` after a rejected step when it is still accurate enough.
    pub reuse_on_reject: bool,
    /// Enforce `ε_H ≤ √ε_g`.
    pub theory_strict: bool,
}

impl<T: Real> TRConfig<T> {
    pub fn new(tol: OptimalityTolerances<T>) -> Self {
        Self {
            delta0: T::one(),
            eta: T::lit(0.2),
            gamma: T::two(),
            alpha: T::half(),
            nu: T::half(),
            tol,
            max_iters: 1000,
            delta_total: T::lit(0.1),
            reuse_on_reject: true,
            theory_strict: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theory_strict {
            self.tol.validate_theory_strict()?;
        } else {
            self.tol.validate()?;
        }
        let open = |name: &str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        open("eta", self.eta)?;
        open("alpha", self.alpha)?;
        open("delta_total", self.delta_total)?;
        if !(self.nu > T::zero() && self.nu <= T::one()) {
            return Err(Error::Config(format!(
                "nu must lie in (0, 1], got {}",
                self.nu
            )));
        }
        if !(self.gamma > T::one() && self.gamma.is_finite()) {
            return Err(Error::Config(format!(
                "gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        if !(self.delta0 > T::zero() && self.delta0.is_finite()) {
            return Err(Error::Config(format!(
                "delta0 must be positive, got {}",
                self.delta0
            )));
        }
        Ok(())
    }
}

/// `ε_t = max{α(1−η)ν ε_H, Δ_t}`
pub fn tr_tolerance<T: Real>(config: &TRConfig<T>, radius: T) -> T {
    (config.alpha * (T::one() - config.eta) * config.nu * config.tol.eps_h).max(radius)
}

pub fn run_tr<T, O, S>(
    objective: &O,
    source: &S,
    x0: &[T],
    config: &TRConfig<T>,
    seed: u64,
) -> Result<SolveOutcome<T>>
where
    T: Real,
    O: Objective<T> + ?Sized,
    S: HessianSource<T> + ?Sized,
{
    run_tr_observed(objective, source, x0, config, seed, &mut |_| {})
}

/// As [`run_tr`], calling `observer` after every trial step.
pub fn run_tr_observed<T, O, S>(
    objective: &O,
    source: &S,
    x0: &[T],
    config: &TRConfig<T>,
    seed: u64,
    observer: &mut dyn FnMut(&StepView<'_, T>),
) -> Result<SolveOutcome<T>>
where
    T: Real,
    O: Objective<T> + ?Sized,
    S: HessianSource<T> + ?Sized,
{
    config.validate()?;
    if x0.len() != objective.dim() {
        return Err(Error::DimensionMismatch {
            expected: objective.dim(),
            got: x0.len(),
        });
    }
    let x = Point::new(x0.to_vec())?.into_vec();
    let failure_prob =
        per_iteration_delta(config.delta_total, &config.tol, DeltaSchedule::TrOptimal);
    let (mut f, mut g) = objective.value_grad(&x);
    let mut progress = Progress {
        x,
        param: config.delta0,
        successes: 0,
        failures: 0,
        trace: Vec::new(),
    };
    if !finite_state(f, &g) {
        return Ok(progress.finish(SolveStatus::Aborted, Some("non-finite value at x0".into())));
    }

    let mut cached: Option<Prepared<T>> = None;
    for t in 0..config.max_iters {
        let radius = progress.param;
        let eps_t = tr_tolerance(config, radius);
        let prepared = match cached.take() {
            Some(p) if config.reuse_on_reject && p.built.accuracy <= eps_t => p,
            _ => prepare(
                source,
                &progress.x,
                eps_t,
                failure_prob,
                config.nu,
                &config.tol,
                seed,
                t,
            )?,
        };
        if !prepared.probe.result.rayleigh.is_finite() {
            return Ok(progress.finish(
                SolveStatus::Aborted,
                Some(format!("non-finite curvature at t = {t}")),
            ));
        }
        if is_optimal(&g, &prepared.probe, &config.tol) {
            progress.terminal_record(t, f, &g, &prepared, eps_t);
            return Ok(progress.finish(SolveStatus::Converged, None));
        }

        let h = &prepared.built.operator;
        let u = prepared.probe.direction().map(|r| r.direction.as_slice());
        let model = TRModel::new(&g, h, radius)?;
        let solution = match solve_tr_subproblem(&model, u) {
            Ok(s) => s,
            Err(e) => {
                return Ok(progress.finish(SolveStatus::Aborted, Some(format!("t = {t}: {e}"))))
            }
        };
        let x_new = add(&progress.x, &solution.step);
        let (f_new, g_new) = objective.value_grad(&x_new);
        if !finite_state(f_new, &g_new) {
            return Ok(progress.finish(
                SolveStatus::Aborted,
                Some(format!("non-finite value at t = {t}")),
            ));
        }
        let rho = match acceptance_ratio(f, f_new, solution.model_decrease()) {
            Ok(r) => r,
            Err(e) => {
                return Ok(progress.finish(SolveStatus::Aborted, Some(format!("t = {t}: {e}"))))
            }
        };
        let accepted = rho >= config.eta;
        progress.trace.push(IterationRecord {
            t,
            f_value: f,
            grad_norm: norm(&g),
            lambda_min_estimate: prepared.probe.result.rayleigh,
            radius_or_sigma: radius,
            rho: Some(rho),
            accepted,
            sample_size: prepared.built.sample_size,
            step_norm: solution.step_norm(),
            eps_t,
            model_decrease: solution.model_decrease(),
        });
        observer(&StepView {
            t,
            x: &progress.x,
            grad: &g,
            hessian: h,
            radius_or_sigma: radius,
            solution: &solution,
            f_old: f,
            f_new,
            accepted,
        });
        if accepted {
            progress.x = x_new;
            f = f_new;
            g = g_new;
            progress.param = radius * config.gamma;
            progress.successes += 1;
        } else {
            progress.param = radius / config.gamma;
            progress.failures += 1;
            cached = Some(prepared);
        }
    }
    Ok(progress.finish(SolveStatus::MaxIters, None))
}
