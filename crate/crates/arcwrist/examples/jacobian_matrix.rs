//! Finite-difference Jacobians against the Richardson oracle.

use arcwrist::{
    condition_number, home_motor_angles, jacobian_fd, jacobian_oracle, DiffScheme, MotorAngles,
    SolverConfig, StructuralParams,
};

fn main() {
    let params = StructuralParams::prototype();
    let home = home_motor_angles();
    let tilted = MotorAngles {
        theta: [
            home.theta[0] + 0.2,
            home.theta[1] - 0.3,
            home.theta[2] + 0.45,
        ],
    };

    for (name, theta) in [("home", &home), ("tilted", &tilted)] {
        let reference = jacobian_oracle(&params, theta).expect("oracle");
        println!("{} point, oracle Jacobian (rows yaw/pitch/roll):", name);
        for i in 0..3 {
            println!(
                "  [{:+.6} {:+.6} {:+.6}]",
                reference[(i, 0)],
                reference[(i, 1)],
                reference[(i, 2)]
            );
        }
        println!(
            "  condition number = {:.6}",
            condition_number(&reference).expect("condition")
        );

        for scheme in [DiffScheme::Forward, DiffScheme::Central] {
            let jac = jacobian_fd(&params, theta, 1e-3, scheme, &SolverConfig::default())
                .expect("finite differences");
            let err = (jac - reference).abs().max();
            println!("  {:?} at step 1e-3: max deviation {:.2e}", scheme, err);
        }
        println!();
    }
}
