//! Forward kinematics at a handful of motor angle sets, cold and warm starts.

use arcwrist::{
    home_motor_angles, solve_fk, InitialGuess, MotorAngles, SolverConfig, StructuralParams,
};

fn main() {
    let params = StructuralParams::prototype();
    let home = home_motor_angles();

    let cases = [
        ("home", [0.0, 0.0, 0.0]),
        ("pure yaw", [0.4, 0.4, 0.4]),
        ("tilted", [0.15, -0.25, 0.05]),
        ("large tilt", [0.6, -0.4, 0.9]),
    ];

    let mut last = None;
    for (name, offset) in cases {
        let theta = MotorAngles {
            theta: [
                home.theta[0] + offset[0],
                home.theta[1] + offset[1],
                home.theta[2] + offset[2],
            ],
        };
        let cfg = SolverConfig {
            initial_guess: match last {
                Some(phi) => InitialGuess::Warm(phi),
                None => InitialGuess::Home,
            },
            ..SolverConfig::default()
        };
        match solve_fk(&params, &theta, &cfg) {
            Ok(sol) => {
                println!(
                    "{:<10}  rpy = ({:+.6}, {:+.6}, {:+.6})  residual = {:.2e}  iters = {}",
                    name,
                    sol.pose.alpha,
                    sol.pose.beta,
                    sol.pose.gamma,
                    sol.residual_norm,
                    sol.iterations
                );
                last = Some(sol.phi);
            }
            Err(e) => println!("{:<10}  failed: {}", name, e),
        }
    }
}
