//! Closed-form inverse kinematics with a round-trip check through FK.

use arcwrist::{
    solve_fk, solve_ik, InitialGuess, PlatformPose, SolverConfig, StructuralParams,
};

fn main() {
    let params = StructuralParams::prototype();

    let poses = [
        PlatformPose::level(),
        PlatformPose::new(0.5, 0.0, 0.0),
        PlatformPose::new(0.0, 0.45, -0.3),
        PlatformPose::new(-1.2, 0.2, 0.55),
        PlatformPose::new(0.0, 0.9, 0.0),
        PlatformPose::new(0.0, 0.98, 0.0),
    ];

    for pose in poses {
        print!(
            "rpy = ({:+.3}, {:+.3}, {:+.3})  ->  ",
            pose.alpha, pose.beta, pose.gamma
        );
        let (theta, phi) = match solve_ik(&params, &pose) {
            Ok(pair) => pair,
            Err(e) => {
                println!("{}", e);
                continue;
            }
        };
        println!(
            "theta = ({:+.6}, {:+.6}, {:+.6})  phi = ({:+.6}, {:+.6}, {:+.6})",
            theta.theta[0], theta.theta[1], theta.theta[2], phi.phi[0], phi.phi[1], phi.phi[2]
        );

        let cfg = SolverConfig {
            initial_guess: InitialGuess::Warm(phi),
            ..SolverConfig::default()
        };
        let sol = solve_fk(&params, &theta, &cfg).expect("round trip");
        let err = (sol.pose.alpha - pose.alpha)
            .abs()
            .max((sol.pose.beta - pose.beta).abs())
            .max((sol.pose.gamma - pose.gamma).abs());
        println!("{:>40}  round-trip error = {:.2e}", "", err);
    }
}
