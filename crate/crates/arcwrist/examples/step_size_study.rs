//! Step-size accuracy study for the forward-difference Jacobian.
//!
//! Runs the standard motor path with the solver tolerance loosened to 1e-8,
//! which moves the accuracy floor up and the best step with it.

use std::time::Instant;

use arcwrist::{default_sweep_path, default_sweep_steps, step_size_sweep, StructuralParams};

fn main() {
    let params = StructuralParams::prototype();
    let path = default_sweep_path();
    let steps = default_sweep_steps();

    let t0 = Instant::now();
    let report = step_size_sweep(&params, &path, &steps, 1e-8).expect("sweep");
    let elapsed = t0.elapsed();

    println!("{:>10}  {:>12}  {:>12}", "step", "max_error", "rmse");
    for (i, step) in report.steps.iter().enumerate() {
        let marker = if *step == report.argmin_step { "  <- best" } else { "" };
        println!(
            "{:>10.0e}  {:>12.4e}  {:>12.4e}{}",
            step, report.max_error[i], report.rmse[i], marker
        );
    }
    println!(
        "\n{} path points in {:.1?}, reference: {}",
        path.len(),
        elapsed,
        report.reference
    );
}
