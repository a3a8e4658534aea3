//! Oracles shared by the integration tests. Nothing here calls into the
//! library's own linear algebra.
#![allow(dead_code)]

use inexact_newton::{DenseMatrix, Objective};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.nrows(), m.ncols(), m.as_slice())
}

/// Eigenvalues ascending with matching unit eigenvectors.
pub fn eigen(m: &DenseMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let e = SymmetricEigen::new(to_na(m));
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| e.eigenvectors.column(k).iter().copied().collect())
        .collect();
    (values, vectors)
}

pub fn min_eig(m: &DenseMatrix<f64>) -> f64 {
    eigen(m).0[0]
}

pub fn spectral_norm(m: &DenseMatrix<f64>) -> f64 {
    let (v, _) = eigen(m);
    v[0].abs().max(v[v.len() - 1].abs())
}

pub fn nrm(v: &[f64]) -> f64 {
    DVector::from_column_slice(v).norm()
}

pub fn ip(a: &[f64], b: &[f64]) -> f64 {
    DVector::from_column_slice(a).dot(&DVector::from_column_slice(b))
}

pub fn mul(m: &DenseMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (to_na(m) * DVector::from_column_slice(v))
        .iter()
        .copied()
        .collect()
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// `(B + Bᵀ)/2` for Gaussian `B`, times `scale`.
pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DenseMatrix<f64> {
    let b = gaussian(rng, d * d);
    let mut m = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = 0.5 * scale * (b[i * d + j] + b[j * d + i]);
        }
    }
    m
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Central differences of the value.
pub fn fd_gradient<O: Objective<f64> + ?Sized>(obj: &O, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[j] += h;
            m[j] -= h;
            (obj.value(&p) - obj.value(&m)) / (2.0 * h)
        })
        .collect()
}

/// Central differences of the gradient, symmetrized.
pub fn fd_hessian<O: Objective<f64> + ?Sized>(obj: &O, x: &[f64], h: f64) -> DenseMatrix<f64> {
    let d = x.len();
    let mut m = DenseMatrix::zeros(d, d);
    for j in 0..d {
        let mut p = x.to_vec();
        let mut q = x.to_vec();
        p[j] += h;
        q[j] -= h;
        let (gp, gq) = (obj.value_grad(&p).1, obj.value_grad(&q).1);
        for i in 0..d {
            m[(i, j)] = (gp[i] - gq[i]) / (2.0 * h);
        }
    }
    let t = to_na(&m);
    let s = (&t + t.transpose()) * 0.5;
    DenseMatrix::from_row_major(d, d, s.transpose().iter().copied().collect())
}

/// `‖a − b‖ / max(‖b‖, floor)` over flattened entries.
pub fn rel_err(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    nrm(&diff) / nrm(b).max(floor)
}
