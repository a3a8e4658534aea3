//! Symmetric linear operators standing in for Hessians.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dot, norm, DenseMatrix};
use crate::sampling::SampleRecord;
use crate::scalar::Real;

/// A linear map `v ↦ Av` on `ℝ^d`.
pub trait LinearOperator<T>: Send + Sync {
    fn dim(&self) -> usize;
    /// Writes `A v` into `out`, overwriting its contents.
    fn apply(&self, v: &[T], out: &mut [T]);
}

/// Where a Hessian operator came from.
#[derive(Debug, Clone)]
pub enum Provenance<T> {
    Exact,
    Subsampled(Arc<SampleRecord<T>>),
    Dense,
}

/// Explicit dense symmetric matrix as an operator.
#[derive(Debug, Clone)]
pub struct DenseOperator<T> {
    matrix: DenseMatrix<T>,
}

impl<T: Real> DenseOperator<T> {
    pub fn new(matrix: DenseMatrix<T>) -> Self {
        assert_eq!(
            matrix.nrows(),
            matrix.ncols(),
            "dense operator must be square"
        );
        Self { matrix }
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }
}

impl<T: Real> LinearOperator<T> for DenseOperator<T> {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, v: &[T], out: &mut [T]) {
        self.matrix.matvec_into(v, out);
    }
}

struct Shifted<T> {
    inner: Arc<dyn LinearOperator<T>>,
    shift: T,
}

impl<T: Real> LinearOperator<T> for Shifted<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, v: &[T], out: &mut [T]) {
        self.inner.apply(v, out);
        for (o, &x) in out.iter_mut().zip(v) {
            *o = *o + self.shift * x;
        }
    }
}

/// Symmetric operator `H` together with a bound `K_H ≥ ‖H‖`.
#[derive(Clone)]
pub struct HessianOperator<T> {
    op: Arc<dyn LinearOperator<T>>,
    norm_bound: T,
    provenance: Provenance<T>,
}

impl<T: fmt::Debug> fmt::Debug for HessianOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HessianOperator")
            .field("dim", &self.op.dim())
            .field("norm_bound", &self.norm_bound)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl<T: Real> HessianOperator<T> {
    pub fn new(op: Arc<dyn LinearOperator<T>>, norm_bound: T, provenance: Provenance<T>) -> Self {
        assert!(norm_bound >= T::zero(), "norm bound must be nonnegative");
        Self {
            op,
            norm_bound,
            provenance,
        }
    }

    /// Wraps an explicit matrix; the bound is its spectral norm.
    pub fn from_dense(matrix: DenseMatrix<T>) -> Self {
        let bound = crate::linalg::symmetric_spectral_norm(&matrix);
        Self::new(
            Arc::new(DenseOperator::new(matrix)),
            bound,
            Provenance::Dense,
        )
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self::from_dense(DenseMatrix::diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn norm_bound(&self) -> T {
        self.norm_bound
    }

    pub fn provenance(&self) -> &Provenance<T> {
        &self.provenance
    }

    pub fn with_norm_bound(&self, norm_bound: T) -> Self {
        Self::new(self.op.clone(), norm_bound, self.provenance.clone())
    }

    /// `H + cI`, with the bound raised by `|c|`.
    pub fn shifted(&self, c: T) -> Self {
        Self::new(
            Arc::new(Shifted {
                inner: self.op.clone(),
                shift: c,
            }),
            self.norm_bound + c.abs(),
            self.provenance.clone(),
        )
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.op.apply(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[T], out: &mut [T]) {
        self.op.apply(v, out);
    }

    /// `⟨v, Hv⟩`
    pub fn quad_form(&self, v: &[T]) -> T {
        dot(v, &self.apply(v))
    }

    /// Materializes the operator column by column, then symmetrizes.
    pub fn densify(&self) -> DenseMatrix<T> {
        let d = self.dim();
        let mut m = DenseMatrix::zeros(d, d);
        let mut e = vec![T::zero(); d];
        let mut col = vec![T::zero(); d];
        for j in 0..d {
            e[j] = T::one();
            self.op.apply(&e, &mut col);
            for i in 0..d {
                m[(i, j)] = col[i];
            }
            e[j] = T::zero();
        }
        m.symmetrize();
        m
    }

    /// Largest relative asymmetry `|⟨u,Hv⟩ − ⟨v,Hu⟩| / (K_H‖u‖‖v‖)` over random pairs.
    pub fn symmetry_defect(&self, pairs: usize, seed: u64) -> T {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let mut worst = T::zero();
        for _ in 0..pairs {
            let u = gaussian_vector::<T>(&mut rng, d);
            let v = gaussian_vector::<T>(&mut rng, d);
            let uhv = dot(&u, &self.apply(&v));
            let vhu = dot(&v, &self.apply(&u));
            let scale = self.norm_bound.max(T::min_positive_value()) * norm(&u) * norm(&v);
            worst = worst.max((uhv - vhu).abs() / scale);
        }
        worst
    }

    pub fn is_symmetric(&self, pairs: usize, seed: u64) -> bool {
        self.symmetry_defect(pairs, seed) <= T::SYMMETRY_TOL
    }

    /// Largest observed `‖Hv‖/‖v‖` over random probes.
    pub fn norm_probe(&self, probes: usize, seed: u64) -> T {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let mut worst = T::zero();
        for _ in 0..probes {
            let v = gaussian_vector::<T>(&mut rng, d);
            worst = worst.max(norm(&self.apply(&v)) / norm(&v));
        }
        worst
    }
}

pub(crate) fn gaussian_vector<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> Vec<T> {
    (0..d)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            T::lit(z)
        })
        .collect()
}
