use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::finite_sum::FiniteSumProblem;
use super::loss::{sigmoid, Loss};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Knobs of [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n: usize,
    pub d: usize,
    /// Squared-norm multiplier of the heavy rows; 1 disables skew.
    pub skew: f64,
    /// Fraction of rows that are heavy when `skew > 1` (at least one row).
    pub heavy_fraction: f64,
    /// Standard deviation of the regression noise.
    pub noise: f64,
    /// Fraction of regression targets replaced by gross outliers.
    pub outlier_fraction: f64,
    /// Rescales all rows so that `K_max` equals this value.
    pub target_k_max: Option<f64>,
}

impl SyntheticConfig {
    pub fn new(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            skew: 1.0,
            heavy_fraction: 0.01,
            noise: 0.1,
            outlier_fraction: 0.05,
            target_k_max: None,
        }
    }
}

/// Gaussian rows `a_i ~ N(0, I/d)` with targets from a planted `x* ~ N(0, I)`.
///
/// Regression losses get `b_i = a_iᵀx* + noise`, with a fraction of gross
/// outliers; `NlsLogistic` gets labels `b_i ~ Bernoulli(sigmoid(a_iᵀx*))`.
pub fn generate_synthetic<T: Real>(
    loss: Loss<T>,
    config: &SyntheticConfig,
    seed: u64,
) -> Result<FiniteSumProblem<T>> {
    let SyntheticConfig {
        n,
        d,
        skew,
        heavy_fraction,
        noise,
        outlier_fraction,
        target_k_max,
    } = *config;
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput(format!(
            "synthetic sizes must be positive, got n={n}, d={d}"
        )));
    }
    if !(skew >= 1.0 && skew.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "skew must be >= 1, got {skew}"
        )));
    }
    for (name, v) in [
        ("heavy_fraction", heavy_fraction),
        ("outlier_fraction", outlier_fraction),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!(
                "{name} must lie in [0, 1], got {v}"
            )));
        }
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "noise must be nonnegative, got {noise}"
        )));
    }
    if let Some(k) = target_k_max {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "target_k_max must be positive, got {k}"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (d as f64).sqrt();
    let mut rows: Vec<f64> = (0..n * d)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        })
        .collect();
    if skew > 1.0 {
        let heavy = ((heavy_fraction * n as f64).round() as usize).clamp(1, n);
        let factor = skew.sqrt();
        for i in sample(&mut rng, n, heavy).iter() {
            rows[i * d..(i + 1) * d]
                .iter_mut()
                .for_each(|v| *v *= factor);
        }
    }
    if let Some(target) = target_k_max {
        let c = loss.curvature_bound().as_f64();
        let max_sq = rows
            .chunks(d)
            .map(|r| r.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max);
        if max_sq > 0.0 {
            let s = (target / (c * max_sq)).sqrt();
            rows.iter_mut().for_each(|v| *v *= s);
        }
    }

    let planted: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let noise_dist = Normal::new(0.0, noise).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let targets: Vec<f64> = rows
        .chunks(d)
        .map(|a| {
            let z: f64 = a.iter().zip(&planted).map(|(p, q)| p * q).sum();
            match loss {
                Loss::NlsLogistic => {
                    if rng.random::<f64>() < sigmoid(z) {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => {
                    let mut b = z + noise_dist.sample(&mut rng);
                    if rng.random::<f64>() < outlier_fraction {
                        let jump: f64 = StandardNormal.sample(&mut rng);
                        b += 10.0 * jump;
                    }
                    b
                }
            }
        })
        .collect();

    let rows = DenseMatrix::from_row_major(n, d, rows.into_iter().map(T::lit).collect());
    FiniteSumProblem::new(rows, targets.into_iter().map(T::lit).collect(), loss)
}
