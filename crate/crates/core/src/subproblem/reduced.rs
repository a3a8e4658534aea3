//! Exact solvers for small dense trust-region and cubic problems.
//!
//! Both work in the eigenbasis `B = QΛQᵀ`, where the stationary points are
//! `v(μ) = −(B + μI)⁻¹g` and the only unknown is the scalar multiplier `μ`.
//! The multiplier is written as `μ = μ_lo + t` with `μ_lo = max(0, −λ₁)` so
//! that `λᵢ + μ` is formed without cancellation near the hard case.

use crate::linalg::{dot, norm, DenseMatrix, SymmetricEigen};
use crate::scalar::Real;

const MAX_SECULAR_ITERS: usize = 400;

#[derive(Debug, Clone)]
pub struct ReducedSolution<T> {
    pub v: Vec<T>,
    /// Multiplier `μ` with `(B + μI)v = −g`.
    pub multiplier: T,
    /// True when the solution needed a bottom-eigenvector component.
    pub hard_case: bool,
}

struct Spectral<T> {
    eig: SymmetricEigen<T>,
    /// `Qᵀg`
    gq: Vec<T>,
    lambda1: T,
    lo: T,
    /// `λᵢ + μ_lo`, formed as `λᵢ − λ₁` when `μ_lo = −λ₁`.
    shifted: Vec<T>,
    /// Indices in the bottom eigenspace whose gradient component is negligible.
    hard_candidates: Vec<usize>,
    gnorm: T,
}

impl<T: Real> Spectral<T> {
    fn new(b: &DenseMatrix<T>, g: &[T], extra_scale: T) -> Self {
        let eig = SymmetricEigen::new(b);
        let p = g.len();
        let gq: Vec<T> = (0..p).map(|k| dot(&eig.vector(k), g)).collect();
        let lambda1 = eig.min_value();
        let lo = (-lambda1).max(T::zero());
        let shifted: Vec<T> = eig
            .values
            .iter()
            .map(|&l| if lo > T::zero() { l - lambda1 } else { l })
            .collect();
        let gnorm = norm(&gq);
        let spread = eig.values.iter().fold(extra_scale, |m, l| m.max(l.abs()));
        let cluster = T::RANK_TOL.sqrt() * spread;
        let bottom: Vec<usize> = (0..p)
            .filter(|&k| eig.values[k] - lambda1 <= cluster)
            .collect();
        let bottom_norm = bottom
            .iter()
            .fold(T::zero(), |acc, &k| acc + gq[k] * gq[k])
            .sqrt();
        let hard_candidates = if bottom_norm <= T::RANK_TOL * gnorm || gnorm == T::zero() {
            bottom
        } else {
            Vec::new()
        };
        Self {
            eig,
            gq,
            lambda1,
            lo,
            shifted,
            hard_candidates,
            gnorm,
        }
    }

    /// Coordinates of `v(μ_lo + t)` in the eigenbasis, skipping `skip`.
    fn coords(&self, t: T, skip: &[usize]) -> Vec<T> {
        self.gq
            .iter()
            .zip(&self.shifted)
            .enumerate()
            .map(|(k, (&gk, &sk))| {
                if skip.contains(&k) {
                    T::zero()
                } else {
                    -gk / (sk + t)
                }
            })
            .collect()
    }

    /// `(‖v‖, Σ ĝ²/(s+t)³)` at `μ_lo + t`.
    fn norm_and_slope(&self, t: T) -> (T, T) {
        let mut sq = T::zero();
        let mut cube = T::zero();
        for (&gk, &sk) in self.gq.iter().zip(&self.shifted) {
            if gk == T::zero() {
                continue;
            }
            let inv = T::one() / (sk + t);
            let term = gk * inv;
            sq = sq + term * term;
            cube = cube + term * term * inv;
        }
        (sq.sqrt(), cube)
    }

    fn to_original(&self, coords: &[T]) -> Vec<T> {
        let p = coords.len();
        let mut v = vec![T::zero(); p];
        for (k, &c) in coords.iter().enumerate() {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = *vi + c * self.eig.vectors[(i, k)];
            }
        }
        v
    }

    /// Adds a bottom-eigenvector component so that the norm becomes `target`.
    fn fill_hard_case(&self, mut coords: Vec<T>, target: T) -> Vec<T> {
        let current = norm(&coords);
        let tau = (target * target - current * current).max(T::zero()).sqrt();
        coords[0] = coords[0] + tau;
        coords
    }
}

/// Safeguarded Newton on an increasing function `φ(t)` over `(0, hi]`.
///
/// `eval` returns `(φ(t), φ'(t), converged)`.
fn secular_root<T: Real>(hi: T, mut eval: impl FnMut(T) -> (T, T, bool)) -> T {
    let mut a = T::zero();
    let mut b = hi;
    let mut t = hi;
    for _ in 0..MAX_SECULAR_ITERS {
        let (phi, dphi, done) = eval(t);
        if done {
            return t;
        }
        if phi > T::zero() {
            b = t;
        } else {
            a = t;
        }
        if b - a <= T::epsilon() * b {
            return b;
        }
        let newton = t - phi / dphi;
        t = if newton > a && newton < b && newton.is_finite() {
            newton
        } else if a > T::zero() && b / a > T::lit(1e3) {
            (a * b).sqrt()
        } else {
            a + (b - a) * T::half()
        };
    }
    t
}

/// `min ⟨g,v⟩ + ½⟨v,Bv⟩` subject to `‖v‖ ≤ Δ`.
pub fn solve_reduced_trust_region<T: Real>(
    b: &DenseMatrix<T>,
    g: &[T],
    radius: T,
) -> ReducedSolution<T> {
    let sp = Spectral::new(b, g, sp_scale(g, radius));
    let p = g.len();

    if sp.gnorm == T::zero() {
        if sp.lambda1 >= T::zero() {
            return ReducedSolution {
                v: vec![T::zero(); p],
                multiplier: T::zero(),
                hard_case: false,
            };
        }
        let coords = sp.fill_hard_case(vec![T::zero(); p], radius);
        return ReducedSolution {
            v: sp.to_original(&coords),
            multiplier: sp.lo,
            hard_case: true,
        };
    }

    if sp.lambda1 > T::zero() {
        let (n0, _) = sp.norm_and_slope(T::zero());
        if n0 <= radius {
            let v = sp.to_original(&sp.coords(T::zero(), &[]));
            return ReducedSolution {
                v,
                multiplier: T::zero(),
                hard_case: false,
            };
        }
    }

    if !sp.hard_candidates.is_empty() {
        let rest = sp.coords(T::zero(), &sp.hard_candidates);
        let rest_norm = norm(&rest);
        if rest_norm.is_finite() && rest_norm <= radius {
            let coords = if sp.lo > T::zero() {
                sp.fill_hard_case(rest, radius)
            } else {
                rest
            };
            return ReducedSolution {
                v: sp.to_original(&coords),
                multiplier: sp.lo,
                hard_case: true,
            };
        }
    }

    let hi = sp.gnorm / radius;
    let t = secular_root(hi, |t| {
        let (nv, cube) = sp.norm_and_slope(t);
        let phi = T::one() / nv - T::one() / radius;
        let dphi = cube / (nv * nv * nv);
        (phi, dphi, (nv - radius).abs() <= T::SECULAR_TOL * radius)
    });
    let mut coords = sp.coords(t, &[]);
    let nv = norm(&coords);
    if nv > radius {
        let scale = radius / nv;
        coords.iter_mut().for_each(|c| *c = *c * scale);
    }
    ReducedSolution {
        v: sp.to_original(&coords),
        multiplier: sp.lo + t,
        hard_case: false,
    }
}

/// `min ⟨g,v⟩ + ½⟨v,Bv⟩ + (σ/3)‖v‖³`.
pub fn solve_reduced_cubic<T: Real>(b: &DenseMatrix<T>, g: &[T], sigma: T) -> ReducedSolution<T> {
    let sp = Spectral::new(b, g, norm(g).sqrt() * sigma.sqrt());
    let p = g.len();

    if sp.gnorm == T::zero() {
        if sp.lambda1 >= T::zero() {
            return ReducedSolution {
                v: vec![T::zero(); p],
                multiplier: T::zero(),
                hard_case: false,
            };
        }
        let coords = sp.fill_hard_case(vec![T::zero(); p], sp.lo / sigma);
        return ReducedSolution {
            v: sp.to_original(&coords),
            multiplier: sp.lo,
            hard_case: true,
        };
    }

    if !sp.hard_candidates.is_empty() && sp.lo > T::zero() {
        let rest = sp.coords(T::zero(), &sp.hard_candidates);
        let rest_norm = norm(&rest);
        let r = sp.lo / sigma;
        if rest_norm.is_finite() && rest_norm <= r {
            let coords = sp.fill_hard_case(rest, r);
            return ReducedSolution {
                v: sp.to_original(&coords),
                multiplier: sp.lo,
                hard_case: true,
            };
        }
    }

    // μ_hi = (−λ₁ + √(λ₁² + 4σ‖g‖))/2 bounds the root; t_hi = μ_hi − μ_lo.
    let l1 = sp.lambda1;
    let disc = (l1 * l1 + T::lit(4.0) * sigma * sp.gnorm).sqrt();
    let mut hi = if l1 < T::zero() {
        T::two() * sigma * sp.gnorm / (disc - l1)
    } else {
        (disc - l1) * T::half()
    };
    // Guard against rounding in the closed-form bracket.
    for _ in 0..64 {
        let (nv, _) = sp.norm_and_slope(hi);
        if nv <= (sp.lo + hi) / sigma {
            break;
        }
        hi = hi * T::two();
    }
    let t = secular_root(hi, |t| {
        let (nv, cube) = sp.norm_and_slope(t);
        let mu = sp.lo + t;
        let phi = T::one() / nv - sigma / mu;
        let dphi = cube / (nv * nv * nv) + sigma / (mu * mu);
        let r = mu / sigma;
        (phi, dphi, (nv - r).abs() <= T::SECULAR_TOL * r)
    });
    let coords = sp.coords(t, &[]);
    ReducedSolution {
        v: sp.to_original(&coords),
        multiplier: sp.lo + t,
        hard_case: false,
    }
}

fn sp_scale<T: Real>(g: &[T], radius: T) -> T {
    norm(g) / radius
}
