//! Single solver runs and their trace files.

use std::fmt::Write as _;

use inexact_newton::linalg::norm;
use inexact_newton::{
    run_arc, run_tr, ARCConfig, OptimalityTolerances, SolveOutcome64, SolveStatus, SymmetricEigen,
    TRConfig,
};

use crate::config::{ExperimentConfig, HessianKind, SolverKind};
use crate::error::HarnessError;
use crate::problem::Problem;

/// Dense eigendecompositions are only attempted up to this dimension.
pub const DENSE_LIMIT: usize = 500;

pub const TRACE_HEADER: &str =
    "t,F,grad_norm,lambda_min_est,radius_or_sigma,rho,accepted,sample_size,step_norm,eps_t";

#[derive(Debug, Clone)]
pub struct RunReport {
    pub solver: SolverKind,
    pub hessian: HessianKind,
    pub seed: u64,
    pub outcome: SolveOutcome64,
    pub terminal_f: f64,
    pub terminal_grad_norm: f64,
    /// `λ_min(∇²F)` at the terminal point; `None` above [`DENSE_LIMIT`].
    pub lambda_min: Option<f64>,
    pub hessian_builds: usize,
    /// Scalar-Hessian evaluations over the whole run.
    pub hessian_cost: usize,
    pub param0: f64,
    pub gamma: f64,
}

impl RunReport {
    pub fn converged(&self) -> bool {
        self.outcome.converged()
    }

    pub fn iterations(&self) -> usize {
        self.outcome.steps().count()
    }

    /// Parameter after the run predicted by the success/failure counts.
    pub fn predicted_parameter(&self) -> f64 {
        let (s, f) = (
            self.outcome.state.successes as i32,
            self.outcome.state.failures as i32,
        );
        let net = match self.solver {
            SolverKind::Tr => s - f,
            SolverKind::Arc => f - s,
        };
        self.param0 * self.gamma.powi(net)
    }

    /// Whether every consecutive pair of trace records moves the parameter by `γ^{±1}`
    /// in the direction its acceptance flag dictates, and the final state matches.
    pub fn parameter_identity_holds(&self) -> bool {
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        let grow_on_accept = self.solver == SolverKind::Tr;
        let steps_ok = self.outcome.trace.windows(2).all(|w| {
            let factor = if w[0].accepted == grow_on_accept {
                self.gamma
            } else {
                1.0 / self.gamma
            };
            rel(w[1].radius_or_sigma, w[0].radius_or_sigma * factor)
        });
        let first_ok = self
            .outcome
            .trace
            .first()
            .is_none_or(|r| rel(r.radius_or_sigma, self.param0));
        steps_ok
            && first_ok
            && rel(
                self.outcome.state.radius_or_sigma,
                self.predicted_parameter(),
            )
    }

    /// `|S|` history as `(size, consecutive iterations)` runs.
    pub fn sample_size_runs(&self) -> Vec<(usize, usize)> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for r in self.outcome.steps() {
            match runs.last_mut() {
                Some((s, c)) if *s == r.sample_size => *c += 1,
                _ => runs.push((r.sample_size, 1)),
            }
        }
        runs
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{TRACE_HEADER}").unwrap();
        for r in &self.outcome.trace {
            let rho = r.rho.map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{},{},{},{:e},{:e}",
                r.t,
                r.f_value,
                r.grad_norm,
                r.lambda_min_estimate,
                r.radius_or_sigma,
                rho,
                u8::from(r.accepted),
                r.sample_size,
                r.step_norm,
                r.eps_t
            )
            .unwrap();
        }
        out.push_str(&self.summary());
        out
    }

    /// `#`-prefixed footer lines.
    pub fn summary(&self) -> String {
        let o = &self.outcome;
        let mut s = String::new();
        let status = match o.status {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::Aborted => "aborted",
        };
        writeln!(s, "# status,{status}").unwrap();
        if let Some(m) = &o.message {
            writeln!(s, "# message,{m}").unwrap();
        }
        writeln!(
            s,
            "# solver,{:?},hessian,{:?},seed,{}",
            self.solver, self.hessian, self.seed
        )
        .unwrap();
        writeln!(s, "# terminal_F,{:e}", self.terminal_f).unwrap();
        writeln!(s, "# terminal_grad_norm,{:e}", self.terminal_grad_norm).unwrap();
        match self.lambda_min {
            Some(l) => writeln!(s, "# terminal_lambda_min,{l:e}").unwrap(),
            None => writeln!(s, "# terminal_lambda_min,skipped (d > {DENSE_LIMIT})").unwrap(),
        }
        writeln!(
            s,
            "# terminal_x,{}",
            join(o.x().iter().map(|v| format!("{v:e}")))
        )
        .unwrap();
        writeln!(
            s,
            "# successes,{},failures,{}",
            o.state.successes, o.state.failures
        )
        .unwrap();
        let eps: Vec<f64> = o.steps().map(|r| r.eps_t).collect();
        if !eps.is_empty() {
            let (lo, hi) = eps
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(l, h), &e| (l.min(e), h.max(e)));
            writeln!(
                s,
                "# eps_t,min,{lo:e},max,{hi:e},last,{:e}",
                eps[eps.len() - 1]
            )
            .unwrap();
        }
        let runs = self
            .sample_size_runs()
            .into_iter()
            .map(|(size, count)| format!("{size}x{count}"));
        writeln!(s, "# sample_size_history,{}", join(runs)).unwrap();
        writeln!(
            s,
            "# hessian_builds,{},hessian_cost,{}",
            self.hessian_builds, self.hessian_cost
        )
        .unwrap();
        writeln!(
            s,
            "# parameter_identity,{},final,{:e},predicted,{:e}",
            if self.parameter_identity_holds() {
                "ok"
            } else {
                "violated"
            },
            o.state.radius_or_sigma,
            self.predicted_parameter()
        )
        .unwrap();
        s
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(";")
}

/// Runs the configured solver with `hessian` from a start point drawn with `seed`.
pub fn run_once(
    config: &ExperimentConfig,
    problem: &Problem,
    hessian: HessianKind,
    seed: u64,
) -> Result<RunReport, HarnessError> {
    let x0 = problem.start(config, seed)?;
    let tol = OptimalityTolerances::new(config.eps_g, config.eps_h)?;
    let source = problem.source(config, hessian);
    let objective = problem.objective();
    let (outcome, param0) = match config.solver {
        SolverKind::Tr => {
            let mut c = TRConfig::new(tol);
            c.delta0 = config.delta0;
            c.eta = config.eta;
            c.gamma = config.gamma;
            c.alpha = config.alpha;
            c.nu = config.nu;
            c.max_iters = config.max_iters;
            c.delta_total = config.delta;
            (run_tr(objective, &source, &x0, &c, seed)?, c.delta0)
        }
        SolverKind::Arc => {
            let mut c = ARCConfig::new(tol, problem.lipschitz(config, &x0));
            c.sigma0 = config.sigma0;
            c.eta = config.eta;
            c.gamma = config.gamma;
            c.nu = config.nu;
            c.zeta = config.zeta;
            c.mode = config.arc_mode.into();
            c.max_iters = config.max_iters;
            c.delta_total = config.delta;
            c.sigma_min = config.sigma_min;
            c.max_subspace_dim = config.max_subspace_dim;
            (run_arc(objective, &source, &x0, &c, seed)?, c.sigma0)
        }
    };
    let (terminal_f, grad) = objective.value_grad(outcome.x());
    let lambda_min = (problem.dim() <= DENSE_LIMIT)
        .then(|| SymmetricEigen::new(&objective.dense_hessian(outcome.x())).min_value());
    Ok(RunReport {
        solver: config.solver,
        hessian,
        seed,
        terminal_f,
        terminal_grad_norm: norm(&grad),
        lambda_min,
        hessian_builds: source.builds(),
        hessian_cost: source.cost(),
        param0,
        gamma: config.gamma,
        outcome,
    })
}

/// The `solve` command: one run, trace written to `config.out` or returned.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let problem = Problem::build(config)?;
    let report = run_once(config, &problem, config.hessian, config.seed)?;
    log::info!(
        "{:?} after {} iterations: F = {:.6e}, |grad F| = {:.3e}",
        report.outcome.status,
        report.iterations(),
        report.terminal_f,
        report.terminal_grad_norm
    );
    if let Some(path) = &config.out {
        std::fs::write(path, report.trace_csv())?;
    }
    Ok(report)
}
