use super::certify::{certify_tr, Certificates};
use super::{
    select_best, solve_reduced_trust_region, StepKind, SubproblemSolution, Subspace, TRModel,
};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scaled};
use crate::scalar::Real;

fn finish<T: Real>(
    model: &TRModel<'_, T>,
    mut step: Vec<T>,
    kind: StepKind,
    subspace_dim: usize,
    eigen_direction: Option<Vec<T>>,
) -> SubproblemSolution<T> {
    let ns = norm(&step);
    if ns > model.radius {
        step = scaled(model.radius / ns, &step);
    }
    let hs = model.hessian.apply(&step);
    let model_value = model.value_with_image(&step, &hs);
    let grad_m: Vec<T> = model.grad.iter().zip(&hs).map(|(&g, &h)| g + h).collect();
    let mut solution = SubproblemSolution {
        step,
        model_value,
        model_grad_norm: norm(&grad_m),
        certificates: Certificates::default(),
        subspace_dim,
        kind,
        eigen_direction,
    };
    solution.certificates = certify_tr(model, &solution, solution.eigen_direction.as_deref());
    solution
}

/// Minimizer of the model along `−g` inside the ball.
pub fn tr_cauchy_point<T: Real>(model: &TRModel<'_, T>) -> Result<SubproblemSolution<T>> {
    let gn = norm(model.grad);
    if gn == T::zero() {
        return Err(Error::InvalidInput(
            "Cauchy point requires a nonzero gradient".into(),
        ));
    }
    let ghg = model.hessian.quad_form(model.grad);
    let tau = if ghg <= T::zero() {
        T::one()
    } else {
        (gn * gn * gn / (model.radius * ghg)).min(T::one())
    };
    let step = scaled(-(tau * model.radius / gn), model.grad);
    Ok(finish(model, step, StepKind::Cauchy, 1, None))
}

/// `±Δ u/‖u‖` with the sign making `⟨g, s⟩ ≤ 0`.
pub fn tr_eigen_point<T: Real>(model: &TRModel<'_, T>, u: &[T]) -> Result<SubproblemSolution<T>> {
    let un = norm(u);
    let uhu = model.hessian.quad_form(u);
    if !(un > T::zero()) || !(uhu < T::zero()) {
        return Err(Error::CertificateViolation(format!(
            "eigen point needs a negative-curvature direction, got <u,Hu> = {uhu}"
        )));
    }
    let sign = if dot(model.grad, u) > T::zero() {
        -T::one()
    } else {
        T::one()
    };
    let step = scaled(sign * model.radius / un, u);
    Ok(finish(model, step, StepKind::Eigen, 1, Some(u.to_vec())))
}

/// Exact minimization of the model over `span(basis)` inside the ball.
pub fn tr_subspace_solve<T: Real>(
    model: &TRModel<'_, T>,
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
    let (b, gr) = space.reduce(model.grad);
    let reduced = solve_reduced_trust_region(&b, &gr, model.radius);
    let step = space.lift(&reduced.v);
    Ok(finish(model, step, StepKind::Subspace, space.dim(), None))
}

/// Trust-region step over `span{g, u, Hg}`, never worse than the Cauchy and
/// Eigen points. `u` is the negative-curvature direction, when one was found.
pub fn solve_tr_subproblem<T: Real>(
    model: &TRModel<'_, T>,
    u: Option<&[T]>,
) -> Result<SubproblemSolution<T>> {
    let has_grad = norm(model.grad) > T::zero();
    if !has_grad && u.is_none() {
        return Err(Error::InvalidInput(
            "zero gradient and no negative curvature: the model has no descent direction".into(),
        ));
    }
    let cauchy = if has_grad {
        Some(tr_cauchy_point(model)?)
    } else {
        None
    };
    let eigen = u.map(|u| tr_eigen_point(model, u)).transpose()?;

    let mut basis = Vec::with_capacity(3);
    if has_grad {
        basis.push(model.grad.to_vec());
    }
    if let Some(u) = u {
        basis.push(u.to_vec());
    }
    let anchor = if has_grad {
        model.grad
    } else {
        u.expect("checked above")
    };
    basis.push(model.hessian.apply(anchor));
    let subspace = tr_subspace_solve(model, &basis)?;

    let mut best = select_best(subspace, eigen, cauchy);
    best.eigen_direction = u.map(<[T]>::to_vec);
    best.certificates = certify_tr(model, &best, u);
    Ok(best)
}
