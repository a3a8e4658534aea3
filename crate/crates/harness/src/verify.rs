//! Monte-Carlo check of the sub-sampling size bounds.

use std::fmt::Write as _;

use inexact_newton::sampling::verify_concentration;
use inexact_newton::{SampleMode, SampleScheme};

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::problem::Problem;
use crate::run::DENSE_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `|S| = n` drawn without replacement: the exact Hessian.
    FullSample,
    /// Size from the bound of the configured sampling mode.
    Prescribed,
    /// A quarter of the prescribed size; expected to fail somewhere.
    Control,
}

#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub kind: RowKind,
    pub mode: SampleMode,
    pub epsilon: f64,
    pub delta: f64,
    pub sample_size: usize,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub max_error: f64,
}

impl VerifyRow {
    pub fn within_delta(&self) -> bool {
        self.failure_rate <= self.delta
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub n: usize,
    pub d: usize,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    /// Full-sample and prescribed rows all within `δ`.
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.kind != RowKind::Control)
            .all(VerifyRow::within_delta)
    }

    /// `Some(true)` when at least one control row exceeded its `δ`.
    pub fn control_detected(&self) -> Option<bool> {
        let mut controls = self
            .rows
            .iter()
            .filter(|r| r.kind == RowKind::Control)
            .peekable();
        controls.peek()?;
        Some(controls.any(|r| !r.within_delta()))
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# n = {}, d = {}", self.n, self.d).unwrap();
        writeln!(
            s,
            "kind,mode,epsilon,delta,sample_size,trials,failures,failure_rate,max_error,result"
        )
        .unwrap();
        for r in &self.rows {
            let result = match (r.kind, r.within_delta()) {
                (RowKind::Control, true) => "within",
                (RowKind::Control, false) => "exceeded",
                (_, true) => "pass",
                (_, false) => "FAIL",
            };
            writeln!(
                s,
                "{:?},{:?},{},{},{},{},{},{:.4},{:.4e},{result}",
                r.kind,
                r.mode,
                r.epsilon,
                r.delta,
                r.sample_size,
                r.trials,
                r.failures,
                r.failure_rate,
                r.max_error
            )
            .unwrap();
        }
        match self.control_detected() {
            Some(true) => writeln!(s, "# negative control: detected").unwrap(),
            Some(false) => {
                writeln!(s, "# negative control: no quartered row exceeded delta").unwrap()
            }
            None => {}
        }
        writeln!(
            s,
            "# overall: {}",
            if self.passed() { "pass" } else { "FAIL" }
        )
        .unwrap();
        s
    }
}

/// Row seeds are spread so that no two rows share a sampling stream.
fn row_seed(seed: u64, row: usize) -> u64 {
    seed.wrapping_add((row as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// The `verify-sampling` command, at the configured start point.
pub fn verify_bounds(config: &ExperimentConfig) -> Result<VerifyReport, HarnessError> {
    let problem = Problem::build(config)?;
    let Some(fs) = problem.finite_sum() else {
        return Err(HarnessError::Config(
            "verify-sampling needs a finite-sum problem".into(),
        ));
    };
    let (n, d) = (fs.n(), fs.dim());
    if d > DENSE_LIMIT {
        return Err(HarnessError::Refused(format!(
            "d = {d} exceeds {DENSE_LIMIT}; dense spectral-norm verification is desk-scale only"
        )));
    }
    let x = problem.start(config, config.seed)?;
    let mode = config
        .hessian
        .sample_mode()
        .unwrap_or(SampleMode::UniformWithoutReplacement);
    let max_eps: f64 = mode.max_epsilon();
    let mut eps: Vec<f64> = config
        .verify_eps
        .iter()
        .copied()
        .filter(|&e| e <= max_eps)
        .collect();
    eps.sort_by(f64::total_cmp);
    if eps.is_empty() {
        return Err(HarnessError::Config(format!(
            "no verify_eps value is at most {max_eps} for {mode:?}"
        )));
    }
    let delta_max = config
        .verify_delta
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut schemes = vec![(
        RowKind::FullSample,
        SampleScheme::with_size(
            SampleMode::UniformWithoutReplacement,
            eps[0],
            delta_max,
            n,
            true,
        )?,
    )];
    for &e in &eps {
        for &delta in &config.verify_delta {
            let scheme = SampleScheme::resolve(fs, &x, mode, e, delta, config.cap_at_n)?;
            schemes.push((RowKind::Prescribed, scheme));
        }
    }
    if config.verify_control {
        for &e in &eps {
            let full = SampleScheme::resolve(fs, &x, mode, e, delta_max, config.cap_at_n)?;
            let quarter = (full.resolved_size / 4).max(1);
            schemes.push((
                RowKind::Control,
                SampleScheme::with_size(mode, e, delta_max, quarter, true)?,
            ));
        }
    }

    let mut rows = Vec::with_capacity(schemes.len());
    for (i, (kind, scheme)) in schemes.into_iter().enumerate() {
        let r = verify_concentration(
            fs,
            &x,
            &scheme,
            config.verify_trials,
            row_seed(config.seed, i),
        )?;
        log::info!(
            "{kind:?} eps={} delta={} |S|={}: rate {:.4}",
            scheme.epsilon,
            scheme.delta,
            scheme.resolved_size,
            r.failure_rate
        );
        rows.push(VerifyRow {
            kind,
            mode: scheme.mode,
            epsilon: scheme.epsilon,
            delta: scheme.delta,
            sample_size: scheme.resolved_size,
            trials: r.trials,
            failures: r.failures,
            failure_rate: r.failure_rate,
            max_error: r.max_error,
        });
    }
    Ok(VerifyReport { n, d, rows })
}
