use super::certify::{certify_arc, Certificates};
use super::{select_best, solve_reduced_cubic, CubicModel, StepKind, SubproblemSolution, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scaled};
use crate::scalar::Real;

fn finish<T: Real>(
    model: &CubicModel<'_, T>,
    step: Vec<T>,
    kind: StepKind,
    subspace_dim: usize,
    eigen_direction: Option<Vec<T>>,
) -> SubproblemSolution<T> {
    let hs = model.hessian.apply(&step);
    let model_value = model.value_with_image(&step, &hs);
    let ns = norm(&step);
    let grad_m: Vec<T> = model
        .grad
        .iter()
        .zip(&hs)
        .zip(&step)
        .map(|((&g, &h), &s)| g + h + model.sigma * ns * s)
        .collect();
    let mut solution = SubproblemSolution {
        step,
        model_value,
        model_grad_norm: norm(&grad_m),
        certificates: Certificates::default(),
        subspace_dim,
        kind,
        eigen_direction,
    };
    solution.certificates =
        certify_arc(model, &solution, solution.eigen_direction.as_deref(), None);
    solution
}

/// `−α g` with `α` the positive root of `σ‖g‖³α² + ⟨g,Hg⟩α − ‖g‖² = 0`.
pub(crate) fn arc_cauchy_step<T: Real>(model: &CubicModel<'_, T>) -> Vec<T> {
    let gn = norm(model.grad);
    if gn == T::zero() {
        return vec![T::zero(); model.grad.len()];
    }
    let c = model.hessian.quad_form(model.grad);
    let g2 = gn * gn;
    let disc = (c * c + T::lit(4.0) * model.sigma * g2 * g2 * gn).sqrt();
    let alpha = if c > T::zero() {
        T::two() * g2 / (c + disc)
    } else {
        (disc - c) / (T::two() * model.sigma * g2 * gn)
    };
    scaled(-alpha, model.grad)
}

/// Global minimizer of `α ↦ m(αu)`.
///
/// With `a = ⟨g,u⟩`, `b = ⟨u,Hu⟩ < 0` and `c = σ‖u‖³` the model along `u` is
/// `aα + (b/2)α² + (c/3)|α|³`; each half-line has at most one interior local
/// minimizer, the larger root of its stationarity quadratic.
pub(crate) fn arc_eigen_step<T: Real>(model: &CubicModel<'_, T>, u: &[T]) -> Result<Vec<T>> {
    let un = norm(u);
    let b = model.hessian.quad_form(u);
    if !(un > T::zero()) || !(b < T::zero()) {
        return Err(Error::CertificateViolation(format!(
            "eigen point needs a negative-curvature direction, got <u,Hu> = {b}"
        )));
    }
    let a = dot(model.grad, u);
    let c = model.sigma * un * un * un;
    let four = T::lit(4.0);
    let along = |alpha: T| {
        let m = alpha.abs();
        a * alpha + T::half() * b * alpha * alpha + c / T::lit(3.0) * m * m * m
    };
    let mut best: Option<(T, T)> = None;
    // α ≥ 0: a + bα + cα² = 0
    let disc_pos = b * b - four * a * c;
    if disc_pos >= T::zero() {
        let alpha = (-b + disc_pos.sqrt()) / (T::two() * c);
        best = Some((along(alpha), alpha));
    }
    // α = −β ≤ 0: −a + bβ + cβ² = 0
    let disc_neg = b * b + four * a * c;
    if disc_neg >= T::zero() {
        let alpha = -(-b + disc_neg.sqrt()) / (T::two() * c);
        let value = along(alpha);
        if best.is_none_or(|(v, _)| value < v) {
            best = Some((value, alpha));
        }
    }
    let (_, alpha) = best.expect("one of b² ± 4ac is nonnegative");
    Ok(scaled(alpha, u))
}

pub fn arc_cauchy_point<T: Real>(model: &CubicModel<'_, T>) -> Result<SubproblemSolution<T>> {
    if norm(model.grad) == T::zero() {
        return Err(Error::InvalidInput(
            "Cauchy point requires a nonzero gradient".into(),
        ));
    }
    Ok(finish(
        model,
        arc_cauchy_step(model),
        StepKind::Cauchy,
        1,
        None,
    ))
}

pub fn arc_eigen_point<T: Real>(
    model: &CubicModel<'_, T>,
    u: &[T],
) -> Result<SubproblemSolution<T>> {
    let step = arc_eigen_step(model, u)?;
    Ok(finish(model, step, StepKind::Eigen, 1, Some(u.to_vec())))
}

fn solve_in<T: Real>(model: &CubicModel<'_, T>, space: &Subspace<T>) -> SubproblemSolution<T> {
    let (b, gr) = space.reduce(model.grad);
    let reduced = solve_reduced_cubic(&b, &gr, model.sigma);
    finish(
        model,
        space.lift(&reduced.v),
        StepKind::Subspace,
        space.dim(),
        None,
    )
}

/// Exact minimization of the cubic model over `span(basis)`.
pub fn arc_subspace_solve<T: Real>(
    model: &CubicModel<'_, T>,
    basis: &[Vec<T>],
) -> Result<SubproblemSolution<T>> {
    let mut space = Subspace::new();
    for v in basis {
        space.push(model.hessian, v);
    }
    if space.dim() == 0 {
        return Err(Error::InvalidInput(
            "subspace basis is empty or numerically zero".into(),
        ));
    }
    Ok(solve_in(model, &space))
}

fn seeds<T: Real>(
    model: &CubicModel<'_, T>,
    u: Option<&[T]>,
) -> Result<(Option<SubproblemSolution<T>>, Option<SubproblemSolution<T>>)> {
    let has_grad = norm(model.grad) > T::zero();
    if !has_grad && u.is_none() {
        return Err(Error::InvalidInput(
            "zero gradient and no negative curvature: the model has no descent direction".into(),
        ));
    }
    let cauchy = if has_grad {
        Some(arc_cauchy_point(model)?)
    } else {
        None
    };
    let eigen = u.map(|u| arc_eigen_point(model, u)).transpose()?;
    Ok((cauchy, eigen))
}

fn finalize<T: Real>(
    model: &CubicModel<'_, T>,
    subspace: SubproblemSolution<T>,
    cauchy: Option<SubproblemSolution<T>>,
    eigen: Option<SubproblemSolution<T>>,
    u: Option<&[T]>,
    zeta: Option<T>,
) -> SubproblemSolution<T> {
    let mut best = select_best(subspace, eigen, cauchy);
    best.eigen_direction = u.map(<[T]>::to_vec);
    best.certificates = certify_arc(model, &best, u, zeta);
    best
}

/// Cubic step over `span{g, u, Hg}`, never worse than the Cauchy and Eigen points.
pub fn solve_arc_subproblem<T: Real>(
    model: &CubicModel<'_, T>,
    u: Option<&[T]>,
) -> Result<SubproblemSolution<T>> {
    let (cauchy, eigen) = seeds(model, u)?;
    let mut space = Subspace::new();
    let anchor = if norm(model.grad) > T::zero() {
        model.grad
    } else {
        u.expect("seeded")
    };
    space.push(model.hessian, model.grad);
    if let Some(u) = u {
        space.push(model.hessian, u);
    }
    let h_anchor = model.hessian.apply(anchor);
    space.push(model.hessian, &h_anchor);
    let subspace = solve_in(model, &space);
    Ok(finalize(model, subspace, cauchy, eigen, u, None))
}

/// Grows the search space `span{g, u, Hg, H²g, …}` one Krylov vector at a
/// time until `‖∇m(s)‖ ≤ ζ max{‖s‖², min(1,‖s‖)‖g‖}` holds, the dimension
/// reaches `max_dim`, or the Krylov space becomes invariant.
pub fn arc_progressive_solve<T: Real>(
    model: &CubicModel<'_, T>,
    u: Option<&[T]>,
    zeta: T,
    max_dim: usize,
) -> Result<SubproblemSolution<T>> {
    if !(zeta > T::zero() && zeta < T::one()) {
        return Err(Error::Config(format!(
            "zeta must lie in (0, 1), got {zeta}"
        )));
    }
    let (cauchy, eigen) = seeds(model, u)?;
    let mut space = Subspace::new();
    let has_grad = norm(model.grad) > T::zero();
    // The Krylov sequence is generated by the last vector it contributed.
    let mut krylov_image: Vec<T>;
    if has_grad {
        space.push(model.hessian, model.grad);
        krylov_image = space.last_image().expect("gradient is nonzero").to_vec();
        if let Some(u) = u {
            space.push(model.hessian, u);
        }
    } else {
        space.push(model.hessian, u.expect("seeded"));
        krylov_image = space.last_image().expect("direction is nonzero").to_vec();
    }
    let max_dim = max_dim.max(space.dim()).min(model.grad.len());
    loop {
        let candidate = solve_in(model, &space);
        let current = finalize(
            model,
            candidate,
            cauchy.clone(),
            eigen.clone(),
            u,
            Some(zeta),
        );
        let met = current.certificates.model_gradient.is_some_and(|c| c.met);
        if met || space.dim() >= max_dim {
            return Ok(current);
        }
        if !space.push(model.hessian, &krylov_image) {
            return Ok(current);
        }
        krylov_image = space.last_image().expect("just pushed").to_vec();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HessianOperator;

    #[test]
    fn cauchy_with_zero_hessian() {
        let h = HessianOperator::<f64>::from_diagonal(&[0.0, 0.0]);
        let m = CubicModel::new(&[1.0, 0.0], &h, 1.0).unwrap();
        let s = arc_cauchy_point(&m).unwrap();
        assert!((s.step[0] + 1.0).abs() < 1e-15);
        assert!((s.model_value + 2.0 / 3.0).abs() < 1e-15);
        assert!(s.certificates.cauchy.unwrap().met);
    }

    #[test]
    fn cauchy_with_identity() {
        let h = HessianOperator::<f64>::from_diagonal(&[1.0, 1.0]);
        let m = CubicModel::new(&[1.0, 0.0], &h, 1.0).unwrap();
        let s = arc_cauchy_point(&m).unwrap();
        let alpha = (-1.0 + 5f64.sqrt()) / 2.0;
        assert!((s.step[0] + alpha).abs() < 1e-15);
        let cert = s.certificates.cauchy.unwrap();
        assert!(cert.met);
        assert!(cert.rhs >= 1.0 / (2.0 * 3f64.sqrt()) - 1e-15);
    }

    #[test]
    fn eigen_point_with_tiny_gradient() {
        let h = HessianOperator::<f64>::from_diagonal(&[1.0, -2.0]);
        let m = CubicModel::new(&[1e-16, 0.0], &h, 1.0).unwrap();
        let s = arc_eigen_point(&m, &[0.0, 1.0]).unwrap();
        assert!((norm(&s.step) - 2.0).abs() < 1e-12);
        assert!((s.model_value + 4.0 / 3.0).abs() < 1e-12);
        assert!(m.sigma * norm(&s.step) >= 2.0 - 1e-12);
    }

    #[test]
    fn eigen_point_follows_negative_gradient() {
        let h = HessianOperator::<f64>::from_diagonal(&[1.0, -2.0]);
        let m = CubicModel::new(&[0.0, 1.0], &h, 1.0).unwrap();
        let s = arc_eigen_point(&m, &[0.0, 1.0]).unwrap();
        assert!(s.step[1] < 0.0);
        assert!(s.certificates.eigen.unwrap().met);
    }

    #[test]
    fn progressive_solve_is_exact_in_two_dimensions() {
        let h =
            HessianOperator::<f64>::from_dense(crate::linalg::DenseMatrix::<f64>::from_rows(&[
                vec![1.0, 0.3],
                vec![0.3, -0.5],
            ]));
        let m = CubicModel::new(&[0.4, -0.2], &h, 0.7).unwrap();
        let s = arc_progressive_solve(&m, None, 0.25, 2).unwrap();
        assert!(s.certificates.model_gradient.unwrap().met);
        assert!(s.model_grad_norm <= 1e-8);
    }
}
