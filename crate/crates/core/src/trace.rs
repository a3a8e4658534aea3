/// One row of a solver trace.
///
/// The final record of a converged run carries the terminal point with
/// `rho = None`, `accepted = false` and a zero step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub t: usize,
    pub f_value: T,
    pub grad_norm: T,
    /// Rayleigh quotient returned by the curvature probe on `H_t`.
    pub lambda_min_estimate: T,
    /// `Δ_t` for trust region, `σ_t` for cubic regularization.
    pub radius_or_sigma: T,
    pub rho: Option<T>,
    pub accepted: bool,
    pub sample_size: usize,
    pub step_norm: T,
    /// Hessian accuracy requested at this iteration.
    pub eps_t: T,
    /// `−m_t(s_t)`; zero on the terminal record.
    pub model_decrease: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    /// Stopped on a non-finite value or a step that cannot decrease the model.
    Aborted,
}

/// `x` with the step-size parameter and the success/failure counters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState<T> {
    pub x: Vec<T>,
    pub radius_or_sigma: T,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub state: SolverState<T>,
    pub trace: Vec<IterationRecord<T>>,
    pub status: SolveStatus,
    /// Diagnostic for an aborted run.
    pub message: Option<String>,
}

impl<T> SolveOutcome<T> {
    pub fn x(&self) -> &[T] {
        &self.state.x
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// Iteration records excluding the terminal one.
    pub fn steps(&self) -> impl Iterator<Item = &IterationRecord<T>> {
        self.trace.iter().filter(|r| r.rho.is_some())
    }
}
