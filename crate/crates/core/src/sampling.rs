//! Sub-sampled Hessians of finite-sum problems.
//!
//! `H(x) = (1/(n|S|)) Σ_{j∈S} (1/p_j) ∇²f_j(x)` for an index multiset `S`
//! drawn from `p`, together with the sample sizes that make
//! `‖H(x) − ∇²F(x)‖ ≤ ε` hold with probability `1 − δ`.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_spectral_norm, CompensatedSum, DenseMatrix};
use crate::objective::{BuiltHessian, HessianSource};
use crate::operator::{HessianOperator, Provenance};
use crate::optimality::OptimalityTolerances;
use crate::problems::{FiniteSumProblem, GlmHessian};
use crate::scalar::Real;
use crate::seed::{derive, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    UniformWithReplacement,
    UniformWithoutReplacement,
    /// i.i.d. draws from the curvature-weighted distribution.
    NonUniform,
    /// As `NonUniform`, sized by the intrinsic dimension instead of `d`.
    NonUniformIntrinsic,
}

impl SampleMode {
    pub fn is_uniform(self) -> bool {
        matches!(
            self,
            Self::UniformWithReplacement | Self::UniformWithoutReplacement
        )
    }

    /// Largest accuracy the size formula of this mode accepts.
    pub fn max_epsilon<T: Real>(self) -> T {
        match self {
            Self::NonUniformIntrinsic => T::half(),
            _ => T::lit(MAX_EPSILON),
        }
    }
}

/// Requests looser than this are tightened to it; the size formulas are stated for `ε < 1`.
const MAX_EPSILON: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleScheme<T> {
    pub mode: SampleMode,
    pub epsilon: T,
    pub delta: T,
    /// `|S|`
    pub resolved_size: usize,
    pub cap_at_n: bool,
}

fn check_open_unit<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v > T::zero() && v < T::one()) {
        return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

/// `constant·K²·ln(log_arg)/ε²` before rounding.
pub fn raw_sample_bound<T: Real>(constant: T, k: T, epsilon: T, log_arg: T) -> T {
    constant * k * k * log_arg.ln() / (epsilon * epsilon)
}

fn ceil_size<T: Real>(raw: T) -> usize {
    raw.ceil().to_usize().unwrap_or(usize::MAX).max(1)
}

fn check_size_inputs<T: Real>(k: T, epsilon: T, delta: T) -> Result<()> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    if !(k > T::zero() && k.is_finite()) {
        return Err(Error::Config(format!(
            "curvature bound must be positive, got {k}"
        )));
    }
    Ok(())
}

/// `⌈16 K_max² ln(2d/δ)/ε²⌉`
pub fn uniform_sample_size<T: Real>(k_max: T, epsilon: T, delta: T, d: usize) -> Result<usize> {
    check_size_inputs(k_max, epsilon, delta)?;
    let arg = T::two() * T::from_usize(d).expect("d fits") / delta;
    Ok(ceil_size(raw_sample_bound(
        T::lit(16.0),
        k_max,
        epsilon,
        arg,
    )))
}

/// `⌈4 K̂² ln(2d/δ)/ε²⌉`
pub fn nonuniform_sample_size<T: Real>(k_hat: T, epsilon: T, delta: T, d: usize) -> Result<usize> {
    check_size_inputs(k_hat, epsilon, delta)?;
    let arg = T::two() * T::from_usize(d).expect("d fits") / delta;
    Ok(ceil_size(raw_sample_bound(
        T::lit(4.0),
        k_hat,
        epsilon,
        arg,
    )))
}

/// `⌈(16/3) K̂² ln(8t/δ)/ε²⌉`, valid for `ε ≤ 1/2`.
pub fn intrinsic_sample_size<T: Real>(
    k_hat: T,
    epsilon: T,
    delta: T,
    t_intrinsic: T,
) -> Result<usize> {
    check_size_inputs(k_hat, epsilon, delta)?;
    if epsilon > T::half() {
        return Err(Error::Config(format!(
            "intrinsic-dimension sizing requires epsilon <= 1/2, got {epsilon}"
        )));
    }
    if !(t_intrinsic >= T::one()) {
        return Err(Error::Config(format!(
            "intrinsic dimension must be >= 1, got {t_intrinsic}"
        )));
    }
    let arg = T::lit(8.0) * t_intrinsic / delta;
    Ok(ceil_size(raw_sample_bound(
        T::lit(16.0) / T::lit(3.0),
        k_hat,
        epsilon,
        arg,
    )))
}

impl<T: Real> SampleScheme<T> {
    /// Sizes the sample for `problem` at `x` by the bound of `mode`.
    pub fn resolve(
        problem: &FiniteSumProblem<T>,
        x: &[T],
        mode: SampleMode,
        epsilon: T,
        delta: T,
        cap_at_n: bool,
    ) -> Result<Self> {
        let d = problem.dim();
        let raw = match mode {
            SampleMode::UniformWithReplacement | SampleMode::UniformWithoutReplacement => {
                uniform_sample_size(problem.k_max(), epsilon, delta, d)?
            }
            SampleMode::NonUniform => nonuniform_sample_size(problem.k_hat(), epsilon, delta, d)?,
            SampleMode::NonUniformIntrinsic => {
                let t = intrinsic_dimension(problem, x);
                intrinsic_sample_size(problem.k_hat(), epsilon, delta, t)?
            }
        };
        let n = problem.n();
        let resolved_size = if cap_at_n && raw > n {
            log::debug!("sample size {raw} capped at n = {n}");
            n
        } else {
            raw
        };
        Self::with_size(mode, epsilon, delta, resolved_size, cap_at_n)
    }

    /// A scheme with an explicitly chosen `|S|`.
    pub fn with_size(
        mode: SampleMode,
        epsilon: T,
        delta: T,
        size: usize,
        cap_at_n: bool,
    ) -> Result<Self> {
        check_open_unit("epsilon", epsilon)?;
        check_open_unit("delta", delta)?;
        if size == 0 {
            return Err(Error::Config("sample size must be at least 1".into()));
        }
        Ok(Self {
            mode,
            epsilon,
            delta,
            resolved_size: size,
            cap_at_n,
        })
    }
}

/// The index multiset behind a sub-sampled operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord<T> {
    pub scheme: SampleScheme<T>,
    /// Drawn indices in ascending order, repeated according to multiplicity.
    pub indices: Vec<usize>,
    /// `p_j` of each entry of `indices`.
    pub probabilities: Vec<T>,
}

/// `p_i ∝ |f''_i(a_iᵀx)|·‖a_i‖²`, falling back to uniform when every weight is zero.
pub fn nonuniform_distribution<T: Real>(problem: &FiniteSumProblem<T>, x: &[T]) -> Vec<T> {
    let rows = problem.rows();
    let weights: Vec<T> = problem
        .curvatures(x)
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.abs() * dot(rows.row(i), rows.row(i)))
        .collect();
    normalize_weights(&weights)
}

fn normalize_weights<T: Real>(weights: &[T]) -> Vec<T> {
    let n = weights.len();
    let mut total = CompensatedSum::new();
    weights.iter().for_each(|&w| total.add(w));
    let total = total.total();
    if !(total > T::zero()) || !total.is_finite() {
        log::warn!("all sampling weights are zero; falling back to the uniform distribution");
        return vec![T::one() / T::from_usize(n).expect("n fits"); n];
    }
    let p: Vec<T> = weights.iter().map(|&w| w / total).collect();
    // A second pass absorbs the rounding of the first division.
    let mut again = CompensatedSum::new();
    p.iter().for_each(|&v| again.add(v));
    let s = again.total();
    p.into_iter().map(|v| v / s).collect()
}

fn draw_indices<T: Real>(
    n: usize,
    scheme: &SampleScheme<T>,
    probabilities: Option<&[T]>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let m = scheme.resolved_size;
    let mut indices = match (scheme.mode, probabilities) {
        (SampleMode::UniformWithReplacement, _) => (0..m).map(|_| rng.random_range(0..n)).collect(),
        (SampleMode::UniformWithoutReplacement, _) => {
            if m > n {
                return Err(Error::Config(format!(
                    "cannot draw {m} distinct indices from {n} rows without replacement"
                )));
            }
            sample(rng, n, m).into_vec()
        }
        (_, Some(p)) => {
            let dist = WeightedIndex::new(p.iter().map(|v| v.as_f64()))
                .map_err(|e| Error::Internal(format!("invalid sampling distribution: {e}")))?;
            (0..m).map(|_| dist.sample(rng)).collect()
        }
        (_, None) => {
            return Err(Error::Internal(
                "non-uniform sampling needs probabilities".into(),
            ))
        }
    };
    indices.sort_unstable();
    Ok(indices)
}

/// Weighted rank-one terms of the sub-sampled Hessian and the drawn multiset.
fn sampled_terms<T: Real>(
    problem: &FiniteSumProblem<T>,
    x: &[T],
    scheme: &SampleScheme<T>,
    seed: u64,
) -> Result<(Vec<(usize, T)>, SampleRecord<T>)> {
    let n = problem.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probabilities = (!scheme.mode.is_uniform()).then(|| nonuniform_distribution(problem, x));
    let indices = draw_indices(n, scheme, probabilities.as_deref(), &mut rng)?;
    let m = T::from_usize(scheme.resolved_size).expect("size fits");
    let n_real = T::from_usize(n).expect("n fits");
    let rows = problem.rows();
    let mut terms = Vec::new();
    let mut start = 0;
    while start < indices.len() {
        let i = indices[start];
        let mut end = start + 1;
        while end < indices.len() && indices[end] == i {
            end += 1;
        }
        let count = T::from_usize(end - start).expect("count fits");
        let curvature = problem
            .loss()
            .eval(dot(rows.row(i), x), problem.targets()[i])
            .2;
        let weight = match &probabilities {
            None => count * curvature / m,
            Some(p) => count * curvature / (n_real * m * p[i]),
        };
        terms.push((i, weight));
        start = end;
    }
    let uniform_p = T::one() / n_real;
    let record_p = indices
        .iter()
        .map(|&i| probabilities.as_ref().map_or(uniform_p, |p| p[i]))
        .collect();
    Ok((
        terms,
        SampleRecord {
            scheme: scheme.clone(),
            indices,
            probabilities: record_p,
        },
    ))
}

/// `K_H` carried by a sub-sampled operator.
fn sampled_norm_bound<T: Real>(problem: &FiniteSumProblem<T>, scheme: &SampleScheme<T>) -> T {
    match scheme.mode {
        // The full sample without replacement reproduces the exact Hessian.
        SampleMode::UniformWithoutReplacement if scheme.resolved_size == problem.n() => {
            problem.k_hat()
        }
        SampleMode::UniformWithReplacement | SampleMode::UniformWithoutReplacement => {
            problem.k_max()
        }
        SampleMode::NonUniform | SampleMode::NonUniformIntrinsic => {
            problem.k_hat() + scheme.epsilon
        }
    }
}

/// Draws `S` and returns the operator `v ↦ (1/(n|S|)) Σ_{j∈S} (1/p_j) f''_j ⟨a_j,v⟩ a_j`.
pub fn build_subsampled_hessian<T: Real>(
    problem: &FiniteSumProblem<T>,
    x: &[T],
    scheme: &SampleScheme<T>,
    seed: u64,
) -> Result<HessianOperator<T>> {
    let (terms, record) = sampled_terms(problem, x, scheme, seed)?;
    let op = GlmHessian::new(problem.rows().clone(), terms)?;
    Ok(HessianOperator::new(
        Arc::new(op),
        sampled_norm_bound(problem, scheme),
        Provenance::Subsampled(Arc::new(record)),
    ))
}

/// How the overall failure probability is split across iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSchedule {
    /// `δ₀ = δ min{ε_g² ε_H, ε_H³}`
    TrOptimal,
    /// `δ₀ = δ min{ε_g², ε_H³}`
    ArcStandard,
    /// `δ₀ = δ min{ε_g^{3/2}, ε_H³}`
    ArcOptimal,
}

pub fn per_iteration_delta<T: Real>(
    delta_total: T,
    tol: &OptimalityTolerances<T>,
    mode: DeltaSchedule,
) -> T {
    let (g, h) = (tol.eps_g, tol.eps_h);
    let h3 = h * h * h;
    let first = match mode {
        DeltaSchedule::TrOptimal => g * g * h,
        DeltaSchedule::ArcStandard => g * g,
        DeltaSchedule::ArcOptimal => g * g.sqrt(),
    };
    delta_total * first.min(h3)
}

/// `tr(M)/‖M‖` for `M = Aᵀ|B|A = (1/n) Σ |f''_i| a_i a_iᵀ`; 1 when `M = 0`.
pub fn intrinsic_dimension<T: Real>(problem: &FiniteSumProblem<T>, x: &[T]) -> T {
    let n = T::from_usize(problem.n()).expect("n fits");
    let terms = problem
        .curvatures(x)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i, c.abs() / n))
        .collect();
    let m = GlmHessian::new(problem.rows().clone(), terms)
        .expect("indices in range")
        .dense();
    psd_intrinsic_dimension(&m)
}

/// `tr(M)/‖M‖₂` of a symmetric positive semidefinite matrix, clamped to `[1, d]`.
pub fn psd_intrinsic_dimension<T: Real>(m: &DenseMatrix<T>) -> T {
    let spectral = symmetric_spectral_norm(m);
    if !(spectral > T::zero()) {
        log::warn!("intrinsic dimension of a zero matrix; using 1");
        return T::one();
    }
    let d = T::from_usize(m.nrows()).expect("d fits");
    (m.trace() / spectral).max(T::one()).min(d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport<T> {
    pub trials: usize,
    /// Trials with `‖H − ∇²F‖ > ε`.
    pub failures: usize,
    pub failure_rate: f64,
    pub max_error: T,
    pub mean_error: T,
}

/// Monte-Carlo estimate of `Pr(‖H(x) − ∇²F(x)‖ > ε)` with dense spectral norms.
pub fn verify_concentration<T: Real>(
    problem: &FiniteSumProblem<T>,
    x: &[T],
    scheme: &SampleScheme<T>,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport<T>> {
    if trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let exact = problem.dense_hessian(x);
    let errors: Vec<T> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let (terms, _) = sampled_terms(problem, x, scheme, derive(seed, k, Stream::Sampling))?;
            let sampled = GlmHessian::new(problem.rows().clone(), terms)?.dense();
            Ok(symmetric_spectral_norm(&sampled.sub(&exact)))
        })
        .collect::<Result<_>>()?;
    let failures = errors.iter().filter(|&&e| e > scheme.epsilon).count();
    let max_error = errors.iter().fold(T::zero(), |m, &e| m.max(e));
    let mean_error = errors.iter().copied().sum::<T>() / T::from_usize(trials).expect("fits");
    Ok(ConcentrationReport {
        trials,
        failures,
        failure_rate: failures as f64 / trials as f64,
        max_error,
        mean_error,
    })
}

/// Hessian source drawing a fresh sample at every call.
#[derive(Debug, Clone)]
pub struct SubsampledHessian<T> {
    problem: Arc<FiniteSumProblem<T>>,
    mode: SampleMode,
    cap_at_n: bool,
    fixed_size: Option<usize>,
}

impl<T: Real> SubsampledHessian<T> {
    /// Sizes samples by the bound of `mode`, capped at `n`.
    pub fn new(problem: Arc<FiniteSumProblem<T>>, mode: SampleMode) -> Self {
        Self {
            problem,
            mode,
            cap_at_n: true,
            fixed_size: None,
        }
    }

    pub fn with_cap(mut self, cap_at_n: bool) -> Self {
        self.cap_at_n = cap_at_n;
        self
    }

    /// Uses `|S| = size` regardless of the requested accuracy.
    pub fn with_fixed_size(mut self, size: usize) -> Self {
        self.fixed_size = Some(size);
        self
    }

    pub fn problem(&self) -> &Arc<FiniteSumProblem<T>> {
        &self.problem
    }

    fn scheme(&self, x: &[T], accuracy: T, failure_prob: T) -> Result<SampleScheme<T>> {
        let eps = accuracy.min(self.mode.max_epsilon());
        match self.fixed_size {
            Some(size) => {
                SampleScheme::with_size(self.mode, eps, failure_prob, size, self.cap_at_n)
            }
            None => SampleScheme::resolve(
                &self.problem,
                x,
                self.mode,
                eps,
                failure_prob,
                self.cap_at_n,
            ),
        }
    }
}

impl<T: Real> HessianSource<T> for SubsampledHessian<T> {
    fn build(&self, x: &[T], accuracy: T, failure_prob: T, seed: u64) -> Result<BuiltHessian<T>> {
        let scheme = self.scheme(x, accuracy, failure_prob)?;
        let operator = build_subsampled_hessian(&self.problem, x, &scheme, seed)?;
        let distinct = match operator.provenance() {
            Provenance::Subsampled(record) => record.indices.len(),
            _ => scheme.resolved_size,
        };
        Ok(BuiltHessian {
            operator,
            accuracy: scheme.epsilon,
            sample_size: scheme.resolved_size,
            cost: distinct,
        })
    }

    fn norm_bound_hint(&self, accuracy: T) -> Option<T> {
        let eps = accuracy.min(self.mode.max_epsilon());
        let p = &self.problem;
        Some(match self.mode {
            SampleMode::UniformWithoutReplacement if self.fixed_size == Some(p.n()) => p.k_hat(),
            SampleMode::UniformWithReplacement | SampleMode::UniformWithoutReplacement => p.k_max(),
            SampleMode::NonUniform | SampleMode::NonUniformIntrinsic => p.k_hat() + eps,
        })
    }
}
