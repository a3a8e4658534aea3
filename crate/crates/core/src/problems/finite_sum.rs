use std::sync::Arc;

use super::loss::Loss;
use crate::error::{Error, Result};
use crate::linalg::{dot, CompensatedSum, DenseMatrix};
use crate::objective::Objective;
use crate::operator::{HessianOperator, LinearOperator, Provenance};
use crate::scalar::{all_finite, Real};

/// `v ↦ Σ_k w_k ⟨a_{i_k}, v⟩ a_{i_k}` over a list of weighted rows.
#[derive(Debug, Clone)]
pub struct GlmHessian<T> {
    rows: Arc<DenseMatrix<T>>,
    terms: Vec<(usize, T)>,
}

impl<T: Real> GlmHessian<T> {
    pub fn new(rows: Arc<DenseMatrix<T>>, terms: Vec<(usize, T)>) -> Result<Self> {
        if let Some(&(i, _)) = terms.iter().find(|(i, _)| *i >= rows.nrows()) {
            return Err(Error::Internal(format!("row index {i} out of range")));
        }
        Ok(Self { rows, terms })
    }

    pub fn terms(&self) -> &[(usize, T)] {
        &self.terms
    }

    /// `Σ_k w_k a_k a_kᵀ`
    pub fn dense(&self) -> DenseMatrix<T> {
        let d = self.rows.ncols();
        let mut m = DenseMatrix::zeros(d, d);
        for &(i, w) in &self.terms {
            m.rank_one_update(w, self.rows.row(i));
        }
        m
    }
}

impl<T: Real> LinearOperator<T> for GlmHessian<T> {
    fn dim(&self) -> usize {
        self.rows.ncols()
    }

    fn apply(&self, v: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        for &(i, w) in &self.terms {
            let a = self.rows.row(i);
            let c = w * dot(a, v);
            for (o, &aj) in out.iter_mut().zip(a) {
                *o = *o + c * aj;
            }
        }
    }
}

/// `F(x) = (1/n) Σ f(a_iᵀx; b_i)`.
#[derive(Debug, Clone)]
pub struct FiniteSumProblem<T> {
    rows: Arc<DenseMatrix<T>>,
    targets: Vec<T>,
    loss: Loss<T>,
    row_bounds: Vec<T>,
    k_max: T,
    k_hat: T,
}

impl<T: Real> FiniteSumProblem<T> {
    pub fn new(rows: DenseMatrix<T>, targets: Vec<T>, loss: Loss<T>) -> Result<Self> {
        let n = rows.nrows();
        if n == 0 || rows.ncols() == 0 {
            return Err(Error::InvalidInput(
                "problem needs at least one row and one column".into(),
            ));
        }
        if targets.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: targets.len(),
            });
        }
        if !all_finite(rows.as_slice()) || !all_finite(&targets) {
            return Err(Error::InvalidInput(
                "data contains non-finite values".into(),
            ));
        }
        let c = loss.curvature_bound();
        let row_bounds: Vec<T> = (0..n).map(|i| c * dot(rows.row(i), rows.row(i))).collect();
        let k_max = row_bounds.iter().fold(T::zero(), |m, &k| m.max(k));
        let mut sum = CompensatedSum::new();
        row_bounds.iter().for_each(|&k| sum.add(k));
        let k_hat = sum.total() / T::from_usize(n).expect("n fits");
        Ok(Self {
            rows: Arc::new(rows),
            targets,
            loss,
            row_bounds,
            k_max,
            k_hat,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &Arc<DenseMatrix<T>> {
        &self.rows
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn loss(&self) -> &Loss<T> {
        &self.loss
    }

    /// `K_i`
    pub fn row_bounds(&self) -> &[T] {
        &self.row_bounds
    }

    pub fn k_max(&self) -> T {
        self.k_max
    }

    /// `K̂ = mean(K_i)`
    pub fn k_hat(&self) -> T {
        self.k_hat
    }

    fn n_real(&self) -> T {
        T::from_usize(self.n()).expect("n fits")
    }

    /// `f''(a_iᵀx; b_i)` for every row.
    pub fn curvatures(&self, x: &[T]) -> Vec<T> {
        (0..self.n())
            .map(|i| self.loss.eval(dot(self.rows.row(i), x), self.targets[i]).2)
            .collect()
    }

    /// Exact GLM Hessian operator `(1/n) Σ f''_i a_i a_iᵀ`; bounded by `K̂`.
    pub fn exact_hessian_operator(&self, x: &[T]) -> HessianOperator<T> {
        let n = self.n_real();
        let terms = self
            .curvatures(x)
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i, c / n))
            .collect();
        let op = GlmHessian::new(self.rows.clone(), terms).expect("indices in range");
        HessianOperator::new(Arc::new(op), self.k_hat, Provenance::Exact)
    }

    pub fn dense_hessian(&self, x: &[T]) -> DenseMatrix<T> {
        let n = self.n_real();
        let terms = self
            .curvatures(x)
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i, c / n))
            .collect();
        GlmHessian::new(self.rows.clone(), terms)
            .expect("indices in range")
            .dense()
    }
}

impl<T: Real> Objective<T> for FiniteSumProblem<T> {
    fn dim(&self) -> usize {
        self.rows.ncols()
    }

    fn value_grad(&self, x: &[T]) -> (T, Vec<T>) {
        let d = self.dim();
        let mut value = CompensatedSum::new();
        let mut grad = vec![CompensatedSum::new(); d];
        for i in 0..self.n() {
            let a = self.rows.row(i);
            let (f, df, _) = self.loss.eval(dot(a, x), self.targets[i]);
            value.add(f);
            for (g, &aj) in grad.iter_mut().zip(a) {
                g.add(df * aj);
            }
        }
        let n = self.n_real();
        (
            value.total() / n,
            grad.iter().map(|g| g.total() / n).collect(),
        )
    }

    fn hessian(&self, x: &[T]) -> HessianOperator<T> {
        self.exact_hessian_operator(x)
    }

    fn dense_hessian(&self, x: &[T]) -> DenseMatrix<T> {
        FiniteSumProblem::dense_hessian(self, x)
    }

    fn hessian_cost(&self) -> usize {
        self.n()
    }
}
