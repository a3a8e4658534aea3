//! Approximate optimality tests and the step acceptance ratio.

use crate::curvature::{probe_negative_curvature, CurvatureProbe, SecondOrderStatus};
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::operator::HessianOperator;
use crate::scalar::{all_finite, Real};

/// Targets `‖∇F‖ ≤ ε_g` and `λ_min(∇²F) ≥ −ε_H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityTolerances<T> {
    pub eps_g: T,
    pub eps_h: T,
}

impl<T: Real> OptimalityTolerances<T> {
    pub fn new(eps_g: T, eps_h: T) -> Result<Self> {
        let tol = Self { eps_g, eps_h };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_g", self.eps_g), ("eps_H", self.eps_h)] {
            if !(v > T::zero() && v < T::one()) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// The trust-region complexity bound assumes `ε_H ≤ √ε_g`.
    pub fn validate_theory_strict(&self) -> Result<()> {
        self.validate()?;
        if self.eps_h > self.eps_g.sqrt() {
            return Err(Error::Config(format!(
                "theory-strict mode requires eps_H <= sqrt(eps_g), got eps_H = {} and eps_g = {}",
                self.eps_h, self.eps_g
            )));
        }
        Ok(())
    }
}

/// `‖grad‖ ≤ ε_g`, boundary inclusive.
pub fn check_first_order<T: Real>(grad: &[T], tol: &OptimalityTolerances<T>) -> Result<bool> {
    if !all_finite(grad) {
        return Err(Error::InvalidInput(
            "gradient has non-finite entries".into(),
        ));
    }
    Ok(norm(grad) <= tol.eps_g)
}

/// Parameters of the curvature probe used by [`check_second_order`].
#[derive(Debug, Clone, Copy)]
pub struct ProbeSettings<T> {
    pub nu: T,
    pub delta: T,
    pub seed: u64,
}

/// Probes `H` for a direction with `⟨u,Hu⟩ ≤ −ν·ε_H`.
///
/// Only [`SecondOrderStatus::Certified`] counts as passing; an inconclusive
/// probe is treated as "not optimal".
pub fn check_second_order<T: Real>(
    h: &HessianOperator<T>,
    tol: &OptimalityTolerances<T>,
    probe: ProbeSettings<T>,
) -> Result<(bool, CurvatureProbe<T>)> {
    let result = probe_negative_curvature(h, tol.eps_h, probe.nu, probe.delta, probe.seed)?;
    Ok((result.status() == SecondOrderStatus::Certified, result))
}

/// `ρ = (F_old − F_new) / (−m(s))`.
pub fn acceptance_ratio<T: Real>(f_old: T, f_new: T, model_decrease: T) -> Result<T> {
    if !(model_decrease > T::zero()) {
        return Err(Error::CertificateViolation(format!(
            "model decrease must be strictly positive, got {model_decrease}"
        )));
    }
    Ok((f_old - f_new) / model_decrease)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(g: f64, h: f64) -> OptimalityTolerances<f64> {
        OptimalityTolerances::new(g, h).unwrap()
    }

    #[test]
    fn first_order_boundary_is_inclusive() {
        assert!(check_first_order(&[0.0, 0.0], &tol(0.1, 0.1)).unwrap());
        assert!(check_first_order(&[0.3, 0.4], &tol(0.5, 0.1)).unwrap());
        assert!(!check_first_order(&[1.0, 0.0], &tol(0.5, 0.1)).unwrap());
        assert!(check_first_order(&[f64::NAN], &tol(0.5, 0.1)).is_err());
    }

    #[test]
    fn tolerances_are_validated() {
        assert!(OptimalityTolerances::new(0.0, 0.5).is_err());
        assert!(OptimalityTolerances::new(0.5, 1.0).is_err());
        assert!(tol(1e-4, 1e-2).validate_theory_strict().is_ok());
        assert!(tol(1e-4, 0.1).validate_theory_strict().is_err());
    }

    #[test]
    fn second_order_examples() {
        let settings = ProbeSettings {
            nu: 0.9,
            delta: 0.1,
            seed: 5,
        };
        let eye = HessianOperator::<f64>::from_diagonal(&[1.0; 3]);
        let nu = crate::curvature::nu_floor(1.0, 0.1);
        assert!(
            check_second_order(&eye, &tol(0.1, 0.1), ProbeSettings { nu, ..settings })
                .unwrap()
                .0
        );
        let saddle = HessianOperator::<f64>::from_diagonal(&[1.0, -1.0]);
        let (ok, probe) = check_second_order(&saddle, &tol(0.1, 0.5), settings).unwrap();
        assert!(!ok);
        assert_eq!(probe.status(), SecondOrderStatus::NegativeCurvature);
    }

    #[test]
    fn acceptance_ratio_examples() {
        assert_eq!(acceptance_ratio(1.0, 0.5, 0.5).unwrap(), 1.0);
        assert!((acceptance_ratio(1.0f64, 1.2, 0.5).unwrap() + 0.4).abs() < 1e-15);
        assert!(matches!(
            acceptance_ratio(1.0, 0.5, 0.0),
            Err(Error::CertificateViolation(_))
        ));
    }
}
