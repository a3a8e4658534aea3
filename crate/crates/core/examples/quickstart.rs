use std::sync::Arc;

use inexact_newton::problems::{generate_synthetic, SyntheticConfig};
use inexact_newton::*;

fn main() -> Result<()> {
    let mut data = SyntheticConfig::new(1000, 50);
    data.target_k_max = Some(1.0);
    let problem = Arc::new(generate_synthetic::<f64>(Loss::BiWeight, &data, 0)?);
    let source = SubsampledHessian::new(problem.clone(), SampleMode::UniformWithoutReplacement);
    let tol = OptimalityTolerances::new(1e-4, 1e-2)?;

    let tr = run_tr(&*problem, &source, &vec![0.5; 50], &TRConfig::new(tol), 7)?;
    let arc = run_arc(
        &*problem,
        &source,
        &vec![0.5; 50],
        &ARCConfig::new(tol, 1.0),
        7,
    )?;
    assert!(tr.converged() && arc.converged());
    for (name, out) in [("TR", &tr), ("ARC", &arc)] {
        let last = out.trace.last().expect("non-empty trace");
        println!(
            "{name}: {} iterations, F = {:.6}, |grad F| = {:.2e}, sample sizes {:?}",
            out.steps().count(),
            last.f_value,
            last.grad_norm,
            out.steps().map(|r| r.sample_size).collect::<Vec<_>>()
        );
    }
    Ok(())
}
