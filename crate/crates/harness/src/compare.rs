//! Paired exact-Hessian and sampled-Hessian runs.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, HessianKind};
use crate::error::HarnessError;
use crate::problem::Problem;
use crate::run::{run_once, RunReport, DENSE_LIMIT};

#[derive(Debug, Clone)]
pub struct TrialPair {
    pub seed: u64,
    pub exact: RunReport,
    pub sampled: RunReport,
}

impl TrialPair {
    /// `‖∇F‖ ≤ ε_g` and `λ_min(∇²F) ≥ −(ε + ε_H)` at the sampled run's terminal
    /// point, with `ε` the accuracy requested on its last record.
    pub fn sampled_optimal(&self, eps_g: f64, eps_h: f64) -> bool {
        let eps = self.sampled.outcome.trace.last().map_or(0.0, |r| r.eps_t);
        self.sampled.converged()
            && self.sampled.terminal_grad_norm <= eps_g
            && self.sampled.lambda_min.is_some_and(|l| l >= -(eps + eps_h))
    }

    /// Sampled over exact scalar-Hessian evaluations per Hessian build.
    pub fn cost_ratio(&self) -> f64 {
        let per_build = |r: &RunReport| r.hessian_cost as f64 / r.hessian_builds.max(1) as f64;
        per_build(&self.sampled) / per_build(&self.exact)
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub eps_g: f64,
    pub eps_h: f64,
    pub delta: f64,
    pub pairs: Vec<TrialPair>,
}

impl CompareReport {
    pub fn optimal_fraction(&self) -> f64 {
        let hits = self
            .pairs
            .iter()
            .filter(|p| p.sampled_optimal(self.eps_g, self.eps_h))
            .count();
        hits as f64 / self.pairs.len() as f64
    }

    /// The sampled runs reach approximate optimality in at least a `1 − δ` fraction of trials.
    pub fn passed(&self) -> bool {
        self.optimal_fraction() >= 1.0 - self.delta
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "seed,exact_converged,exact_iters,exact_grad_norm,exact_lambda_min,sampled_converged,sampled_iters,sampled_grad_norm,sampled_lambda_min,sampled_optimal,cost_ratio"
        )
        .unwrap();
        let lam = |r: &RunReport| r.lambda_min.map(|l| format!("{l:e}")).unwrap_or_default();
        for p in &self.pairs {
            writeln!(
                s,
                "{},{},{},{:e},{},{},{},{:e},{},{},{:.4}",
                p.seed,
                u8::from(p.exact.converged()),
                p.exact.iterations(),
                p.exact.terminal_grad_norm,
                lam(&p.exact),
                u8::from(p.sampled.converged()),
                p.sampled.iterations(),
                p.sampled.terminal_grad_norm,
                lam(&p.sampled),
                u8::from(p.sampled_optimal(self.eps_g, self.eps_h)),
                p.cost_ratio()
            )
            .unwrap();
        }
        let mean_ratio =
            self.pairs.iter().map(TrialPair::cost_ratio).sum::<f64>() / self.pairs.len() as f64;
        writeln!(
            s,
            "# sampled optimal fraction,{:.4},required,{:.4}",
            self.optimal_fraction(),
            1.0 - self.delta
        )
        .unwrap();
        writeln!(s, "# mean cost ratio,{mean_ratio:.4}").unwrap();
        writeln!(
            s,
            "# overall: {}",
            if self.passed() { "pass" } else { "FAIL" }
        )
        .unwrap();
        s
    }
}

/// The `compare` command over seeds `seed, seed + 1, ..., seed + trials − 1`.
pub fn compare_exact_vs_sampled(
    config: &ExperimentConfig,
    trials: usize,
) -> Result<CompareReport, HarnessError> {
    if config.hessian == HessianKind::Exact {
        return Err(HarnessError::Config(
            "compare needs a sampled `hessian` mode".into(),
        ));
    }
    if trials == 0 {
        return Err(HarnessError::Config(
            "compare needs at least one trial".into(),
        ));
    }
    let problem = Problem::build(config)?;
    if problem.dim() > DENSE_LIMIT {
        return Err(HarnessError::Refused(format!(
            "d = {} exceeds {DENSE_LIMIT}; terminal eigenvalue checks are desk-scale only",
            problem.dim()
        )));
    }
    let pairs = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = config.seed.wrapping_add(k);
            Ok(TrialPair {
                seed,
                exact: run_once(config, &problem, HessianKind::Exact, seed)?,
                sampled: run_once(config, &problem, config.hessian, seed)?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(CompareReport {
        eps_g: config.eps_g,
        eps_h: config.eps_h,
        delta: config.delta,
        pairs,
    })
}
