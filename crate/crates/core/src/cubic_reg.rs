//! Adaptive cubic regularization with an inexact Hessian.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::driver::{finite_state, is_optimal, prepare, Prepared, Progress};
use crate::error::{Error, Result};
use crate::linalg::{add, norm, symmetric_spectral_norm};
use crate::objective::{HessianSource, Objective, StepView};
use crate::operator::gaussian_vector;
use crate::optimality::{acceptance_ratio, OptimalityTolerances};
use crate::point::Point;
use crate::sampling::{per_iteration_delta, DeltaSchedule, SampleMode};
use crate::scalar::Real;
use crate::subproblem::{arc_progressive_solve, solve_arc_subproblem, CubicModel};
use crate::trace::{IterationRecord, SolveOutcome, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcMode {
    /// Cauchy and Eigen decrease over a three-dimensional subspace.
    Standard,
    /// Additionally drives `‖∇m(s)‖` below `ζ max{‖s‖², min(1,‖s‖)‖g‖}`.
    Optimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ARCConfig<T> {
    pub sigma0: T,
    pub eta: T,
    pub gamma: T,
    /// Floor on the curvature-probe parameter; raised per iteration to `2K_t/(2K_t + ε_H)`.
    pub nu: T,
    pub zeta: T,
    /// Estimate of the Hessian Lipschitz constant `L`.
    pub l_estimate: T,
    pub tol: OptimalityTolerances<T>,
    pub mode: ArcMode,
    pub max_iters: usize,
    pub delta_total: T,
    /// Optional lower bound on `σ_t`; `None` keeps `σ_t = σ₀γ^(fail−succ)` exact.
    pub sigma_min: Option<T>,
    /// Largest search-space dimension in optimal mode; defaults to `min(d, 50)`.
    pub max_subspace_dim: Option<usize>,
}

impl<T: Real> ARCConfig<T> {
    pub fn new(tol: OptimalityTolerances<T>, l_estimate: T) -> Self {
        Self {
            sigma0: T::one(),
            eta: T::lit(0.2),
            gamma: T::two(),
            nu: T::half(),
            zeta: T::lit(0.25),
            l_estimate,
            tol,
            mode: ArcMode::Standard,
            max_iters: 1000,
            delta_total: T::lit(0.1),
            sigma_min: None,
            max_subspace_dim: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        let open = |name: &str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        open("eta", self.eta)?;
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
        if !(self.sigma0 > T::zero() && self.sigma0.is_finite()) {
            return Err(Error::Config(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        if !(self.l_estimate > T::zero() && self.l_estimate.is_finite()) {
            return Err(Error::Config(format!(
                "L estimate must be positive, got {}",
                self.l_estimate
            )));
        }
        if self.mode == ArcMode::Optimal && !(self.zeta > T::zero() && self.zeta < T::half()) {
            return Err(Error::Config(format!(
                "zeta must lie in (0, 1/2) in optimal mode, got {}",
                self.zeta
            )));
        }
        if let Some(s) = self.sigma_min {
            if !(s > T::zero()) {
                return Err(Error::Config(format!(
                    "sigma_min must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }
}

/// `min{ min{1/12, (1−η)/6}(√(K²+8Lε_g) − K), min{1/6, (1−η)/3} ν ε_H }`,
/// further capped by `ζ ε_g` in optimal mode.
pub fn arc_epsilon<T: Real>(config: &ARCConfig<T>, norm_bound: T) -> T {
    let one_minus_eta = T::one() - config.eta;
    let k = norm_bound;
    let eight_l_eps = T::lit(8.0) * config.l_estimate * config.tol.eps_g;
    // √(K² + c) − K written without cancellation.
    let surd = eight_l_eps / ((k * k + eight_l_eps).sqrt() + k);
    let first = (T::one() / T::lit(12.0)).min(one_minus_eta / T::lit(6.0)) * surd;
    let second =
        (T::one() / T::lit(6.0)).min(one_minus_eta / T::lit(3.0)) * config.nu * config.tol.eps_h;
    let eps = first.min(second);
    match config.mode {
        ArcMode::Standard => eps,
        ArcMode::Optimal => eps.min(config.zeta * config.tol.eps_g),
    }
}

pub fn run_arc<T, O, S>(
    objective: &O,
    source: &S,
    x0: &[T],
    config: &ARCConfig<T>,
    seed: u64,
) -> Result<SolveOutcome<T>>
where
    T: Real,
    O: Objective<T> + ?Sized,
    S: HessianSource<T> + ?Sized,
{
    run_arc_observed(objective, source, x0, config, seed, &mut |_| {})
}

/// As [`run_arc`], calling `observer` after every trial step.
pub fn run_arc_observed<T, O, S>(
    objective: &O,
    source: &S,
    x0: &[T],
    config: &ARCConfig<T>,
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
    let schedule = match config.mode {
        ArcMode::Standard => DeltaSchedule::ArcStandard,
        ArcMode::Optimal => DeltaSchedule::ArcOptimal,
    };
    let failure_prob = per_iteration_delta(config.delta_total, &config.tol, schedule);
    // The loosest accuracy any source accepts gives the largest K_H, hence a valid ε.
    let norm_bound = source
        .norm_bound_hint(SampleMode::UniformWithReplacement.max_epsilon())
        .unwrap_or_else(|| objective.hessian(&x).norm_bound());
    let eps = arc_epsilon(config, norm_bound);
    let max_dim = config
        .max_subspace_dim
        .unwrap_or_else(|| objective.dim().min(50));

    let (mut f, mut g) = objective.value_grad(&x);
    let mut progress = Progress {
        x,
        param: config.sigma0,
        successes: 0,
        failures: 0,
        trace: Vec::new(),
    };
    if !finite_state(f, &g) {
        return Ok(progress.finish(SolveStatus::Aborted, Some("non-finite value at x0".into())));
    }

    let mut cached: Option<Prepared<T>> = None;
    for t in 0..config.max_iters {
        let sigma = progress.param;
        let prepared = match cached.take() {
            Some(p) => p,
            None => prepare(
                source,
                &progress.x,
                eps,
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
            progress.terminal_record(t, f, &g, &prepared, eps);
            return Ok(progress.finish(SolveStatus::Converged, None));
        }

        let h = &prepared.built.operator;
        let u = prepared.probe.direction().map(|r| r.direction.as_slice());
        let model = CubicModel::new(&g, h, sigma)?;
        let solved = match config.mode {
            ArcMode::Standard => solve_arc_subproblem(&model, u),
            ArcMode::Optimal => arc_progressive_solve(&model, u, config.zeta, max_dim),
        };
        let solution = match solved {
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
            radius_or_sigma: sigma,
            rho: Some(rho),
            accepted,
            sample_size: prepared.built.sample_size,
            step_norm: solution.step_norm(),
            eps_t: eps,
            model_decrease: solution.model_decrease(),
        });
        observer(&StepView {
            t,
            x: &progress.x,
            grad: &g,
            hessian: h,
            radius_or_sigma: sigma,
            solution: &solution,
            f_old: f,
            f_new,
            accepted,
        });
        if accepted {
            progress.x = x_new;
            f = f_new;
            g = g_new;
            let shrunk = sigma / config.gamma;
            progress.param = config.sigma_min.map_or(shrunk, |floor| shrunk.max(floor));
            progress.successes += 1;
        } else {
            progress.param = sigma * config.gamma;
            progress.failures += 1;
            cached = Some(prepared);
        }
    }
    Ok(progress.finish(SolveStatus::MaxIters, None))
}

/// Largest `‖∇²F(y) − ∇²F(z)‖/‖y − z‖` over random pairs in the ball of
/// radius `radius` around `center`, using dense Hessians.
///
/// This is a lower estimate of the true Lipschitz constant on that ball.
pub fn estimate_hessian_lipschitz<T: Real, O: Objective<T> + ?Sized>(
    objective: &O,
    center: &[T],
    radius: T,
    samples: usize,
    seed: u64,
) -> T {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = objective.dim();
    let point = |rng: &mut ChaCha8Rng| {
        let dir = gaussian_vector::<T>(rng, d);
        let scale = radius * T::lit(rng.random::<f64>()) / norm(&dir);
        center
            .iter()
            .zip(&dir)
            .map(|(&c, &v)| c + scale * v)
            .collect::<Vec<T>>()
    };
    let mut best = T::zero();
    for _ in 0..samples {
        let y = point(&mut rng);
        let z = point(&mut rng);
        let dist = norm(&crate::linalg::sub(&y, &z));
        if dist > T::zero() {
            let diff = objective
                .dense_hessian(&y)
                .sub(&objective.dense_hessian(&z));
            best = best.max(symmetric_spectral_norm(&diff) / dist);
        }
    }
    best
}
