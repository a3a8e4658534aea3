//! Builds objectives, Hessian sources and starting points from a config.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use inexact_newton::problems::{
    generate_synthetic, load_dataset, Quadratic, SaddleQuartic, SyntheticConfig,
};
use inexact_newton::{
    estimate_hessian_lipschitz, BuiltHessian, DenseMatrix, ExactHessian, FiniteSumProblem64,
    HessianSource, Objective, SubsampledHessian,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{ExperimentConfig, HessianKind, ProblemKind, StartPoint};
use crate::error::HarnessError;

/// Stream offsets keeping start points and quadratic data independent of the solver seed.
const X0_STREAM: u64 = 0x5851_f42d_4c95_7f2d;
const QUADRATIC_STREAM: u64 = 0x1405_7b7e_f767_814f;

pub enum Problem {
    FiniteSum(Arc<FiniteSumProblem64>),
    Saddle,
    Quadratic(Quadratic<f64>),
}

impl Problem {
    pub fn build(config: &ExperimentConfig) -> Result<Self, HarnessError> {
        let loss = config.loss.loss();
        Ok(match config.problem {
            ProblemKind::Synthetic => {
                let mut synth = SyntheticConfig::new(config.n, config.d);
                synth.skew = config.skew;
                synth.noise = config.noise;
                synth.outlier_fraction = config.outlier_fraction;
                synth.target_k_max = config.target_k_max;
                Self::FiniteSum(Arc::new(generate_synthetic(
                    loss,
                    &synth,
                    config.data_seed,
                )?))
            }
            ProblemKind::File => {
                let path = config
                    .data
                    .as_ref()
                    .expect("checked when the config was parsed");
                let problem = load_dataset(path, config.format.into(), loss)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
                Self::FiniteSum(Arc::new(problem))
            }
            ProblemKind::Saddle => Self::Saddle,
            ProblemKind::Quadratic => Self::Quadratic(random_quadratic(config.d, config.data_seed)),
        })
    }

    pub fn objective(&self) -> &dyn Objective<f64> {
        match self {
            Self::FiniteSum(p) => &**p,
            Self::Saddle => &SaddleQuartic,
            Self::Quadratic(q) => q,
        }
    }

    pub fn dim(&self) -> usize {
        self.objective().dim()
    }

    pub fn finite_sum(&self) -> Option<&Arc<FiniteSumProblem64>> {
        match self {
            Self::FiniteSum(p) => Some(p),
            _ => None,
        }
    }

    /// The Hessian source selected by `hessian`, wrapped in a cost counter.
    pub fn source(&self, config: &ExperimentConfig, hessian: HessianKind) -> CountingSource<'_> {
        let inner: Box<dyn HessianSource<f64> + '_> =
            match (hessian.sample_mode(), self.finite_sum()) {
                (Some(mode), Some(p)) => {
                    let mut s = SubsampledHessian::new(p.clone(), mode).with_cap(config.cap_at_n);
                    if let Some(size) = config.sample_size {
                        s = s.with_fixed_size(size);
                    }
                    Box::new(s)
                }
                _ => Box::new(ExactHessian(self.objective())),
            };
        CountingSource::new(inner)
    }

    /// The configured Lipschitz constant, or a sampled estimate on the ball of
    /// radius `1 + ‖x0‖` around `x0`.
    pub fn lipschitz(&self, config: &ExperimentConfig, x0: &[f64]) -> f64 {
        if let Some(l) = config.lipschitz {
            return l;
        }
        let radius = 1.0 + x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let est = estimate_hessian_lipschitz(self.objective(), x0, radius, 16, config.seed);
        log::info!(
            "estimated Hessian Lipschitz constant {est:.4e} on a ball of radius {radius:.3}"
        );
        // A constant Hessian gives zero; the cubic model still needs a positive value.
        est.max(1e-6)
    }

    /// Starting point for `seed` (only `"gaussian"` depends on it).
    pub fn start(&self, config: &ExperimentConfig, seed: u64) -> Result<Vec<f64>, HarnessError> {
        let d = self.dim();
        match &config.x0 {
            StartPoint::Values(v) if v.len() != d => Err(HarnessError::Config(format!(
                "x0 has {} entries, the problem has d = {d}",
                v.len()
            ))),
            StartPoint::Values(v) => Ok(v.clone()),
            StartPoint::Named(name) if name == "gaussian" => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ X0_STREAM);
                Ok((0..d)
                    .map(|_| config.x0_scale * gaussian(&mut rng))
                    .collect())
            }
            StartPoint::Named(_) => Ok(vec![0.0; d]),
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `A = I + MᵀM/d` with Gaussian `M`, and Gaussian `b`.
fn random_quadratic(d: usize, seed: u64) -> Quadratic<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ QUADRATIC_STREAM);
    let m: Vec<f64> = (0..d * d).map(|_| gaussian(&mut rng)).collect();
    let mut a = DenseMatrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] += (0..d).map(|k| m[k * d + i] * m[k * d + j]).sum::<f64>() / d as f64;
        }
    }
    let b = (0..d).map(|_| gaussian(&mut rng)).collect();
    Quadratic::new(a, b).expect("square matrix of matching size")
}

/// Counts builds and scalar-Hessian evaluations of the wrapped source.
pub struct CountingSource<'a> {
    inner: Box<dyn HessianSource<f64> + 'a>,
    builds: AtomicUsize,
    cost: AtomicUsize,
}

impl<'a> CountingSource<'a> {
    pub fn new(inner: Box<dyn HessianSource<f64> + 'a>) -> Self {
        Self {
            inner,
            builds: AtomicUsize::new(0),
            cost: AtomicUsize::new(0),
        }
    }

    pub fn builds(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    pub fn cost(&self) -> usize {
        self.cost.load(Ordering::Relaxed)
    }
}

impl HessianSource<f64> for CountingSource<'_> {
    fn build(
        &self,
        x: &[f64],
        accuracy: f64,
        failure_prob: f64,
        seed: u64,
    ) -> inexact_newton::Result<BuiltHessian<f64>> {
        let built = self.inner.build(x, accuracy, failure_prob, seed)?;
        self.builds.fetch_add(1, Ordering::Relaxed);
        self.cost.fetch_add(built.cost, Ordering::Relaxed);
        Ok(built)
    }

    fn norm_bound_hint(&self, accuracy: f64) -> Option<f64> {
        self.inner.norm_bound_hint(accuracy)
    }
}
