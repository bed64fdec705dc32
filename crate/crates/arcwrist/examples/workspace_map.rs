//! Reachability map over the pitch/roll grid, drawn as ASCII.

use arcwrist::{sample_workspace, StructuralParams};

fn main() {
    let params = StructuralParams::prototype();
    let resolution = 0.05;
    let samples = sample_workspace(&params, resolution).expect("grid");

    let n = (0.8 / resolution) as i64;
    let side = (2 * n + 1) as usize;
    let mut grid = vec![vec![' '; side]; side];
    for s in &samples {
        let col = (s.gamma / resolution).round() as i64 + n;
        let row = n - (s.beta / resolution).round() as i64;
        grid[row as usize][col as usize] = if s.feasible { '#' } else { '.' };
    }

    println!("pitch up, roll right, {} rad per cell\n", resolution);
    for row in grid {
        println!("  {}", row.iter().collect::<String>());
    }

    let feasible = samples.iter().filter(|s| s.feasible).count();
    let max_radius = samples
        .iter()
        .filter(|s| s.feasible)
        .map(|s| s.beta.hypot(s.gamma))
        .fold(0.0f64, f64::max);
    println!(
        "\n{} of {} nodes feasible, outermost radius {:.4} rad",
        feasible,
        samples.len(),
        max_radius
    );
}
