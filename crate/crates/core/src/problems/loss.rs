use std::fmt::Debug;
use std::sync::Arc;

use crate::scalar::Real;

/// A scalar loss `f(z; b)` with its first two derivatives in `z`.
pub trait ScalarLoss<T>: Send + Sync + Debug {
    /// `(f, f', f'')` at margin `z` and target `b`.
    fn eval(&self, z: T, b: T) -> (T, T, T);
    /// An upper bound on `sup_z |f''(z; b)|`, so that `K_i = bound·‖a_i‖²`.
    /// Not validated; callers are responsible for its correctness.
    fn curvature_bound(&self) -> T;
}

#[derive(Debug, Clone)]
pub enum Loss<T> {
    /// `r²/(1 + r²)` with `r = z − b`.
    BiWeight,
    /// `(sigmoid(z) − b)²`.
    NlsLogistic,
    Custom(Arc<dyn ScalarLoss<T>>),
}

impl<T: Real> Loss<T> {
    pub fn eval(&self, z: T, b: T) -> (T, T, T) {
        match self {
            Loss::BiWeight => biweight_scalar(z, b),
            Loss::NlsLogistic => nls_logistic_scalar(z, b),
            Loss::Custom(l) => l.eval(z, b),
        }
    }

    /// Constant `c` with `K_i = c‖a_i‖²`.
    pub fn curvature_bound(&self) -> T {
        match self {
            Loss::BiWeight | Loss::NlsLogistic => T::two(),
            Loss::Custom(l) => l.curvature_bound(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Loss::BiWeight => "biweight",
            Loss::NlsLogistic => "nls_logistic",
            Loss::Custom(_) => "custom",
        }
    }
}

/// `r²/(1+r²)`, `2r/(1+r²)²`, `2(1−3r²)/(1+r²)³` with `r = z − b`.
pub fn biweight_scalar<T: Real>(z: T, b: T) -> (T, T, T) {
    let r = z - b;
    let r2 = r * r;
    let q = T::one() + r2;
    let value = r2 / q;
    let first = T::two() * r / (q * q);
    let second = T::two() * (T::one() - T::lit(3.0) * r2) / (q * q * q);
    (value, first, second)
}

/// Logistic sigmoid evaluated without overflow.
pub fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `(s−b)²`, `2(s−b)s'`, `2s'² + 2(s−b)s''` with `s = sigmoid(z)`.
pub fn nls_logistic_scalar<T: Real>(z: T, b: T) -> (T, T, T) {
    let s = sigmoid(z);
    let ds = s * (T::one() - s);
    let d2s = ds * (T::one() - T::two() * s);
    let e = s - b;
    (
        e * e,
        T::two() * e * ds,
        T::two() * ds * ds + T::two() * e * d2s,
    )
}
