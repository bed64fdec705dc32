//! Circular pitch/roll trajectories and the transport-delay tracking error.

use std::f64::consts::PI;

use arcwrist::{circular_trajectory, simulate_tracking, StructuralParams, TrajectorySpec};

fn main() {
    let params = StructuralParams::prototype();
    let amplitude = 0.68;
    let delay = 0.06;

    println!("amplitude {} rad, delay {} s", amplitude, delay);
    println!(
        "{:>8}  {:>14}  {:>14}  {:>14}",
        "period", "zero-crossing", "max", "closed form"
    );
    for period in [4.0, 2.0, 1.0] {
        let spec = TrajectorySpec::new(amplitude, period, 100.0, 1).expect("spec");
        let mut traj = circular_trajectory(&params, &spec).expect("trajectory");
        let report = simulate_tracking(&mut traj, delay).expect("tracking");
        let chord = 2.0 * amplitude * (PI * delay / period).sin();
        println!(
            "{:>8}  {:>14.6}  {:>14.6}  {:>14.6}",
            period, report.zero_crossing_error, report.max_error, chord
        );
    }
}
