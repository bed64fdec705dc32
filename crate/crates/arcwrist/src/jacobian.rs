//! Differential kinematics: finite-difference velocity Jacobians of the
//! forward map, a Richardson-extrapolated reference, step-size studies and
//! conditioning.
//!
//! The forward map has no tractable closed-form derivative, so the Jacobian
//! d(pose)/d(theta) is estimated by differencing forward-kinematics solves.
//! Row order is (yaw, pitch, roll), column j is the response to motor j.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::geometry::{MotorAngles, PlatformPose, StructuralParams};
use crate::kinematics::{solve_fk, wrap_angle, InitialGuess, KinematicsError, SolverConfig};

#[derive(Debug, Error)]
pub enum JacobianError {
    #[error("forward kinematics failed at the base point: {0}")]
    FkFailure(#[from] KinematicsError),
    #[error("forward kinematics failed at a perturbed point: {0}")]
    InfeasiblePerturbation(KinematicsError),
    #[error("Jacobian is numerically singular")]
    SingularMatrix,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

/// Differencing scheme for `jacobian_fd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffScheme {
    /// One-sided, first-order truncation error, 3 extra solves.
    Forward,
    /// Symmetric, second-order truncation error, 6 extra solves.
    Central,
}

fn pose_delta(a: &PlatformPose, b: &PlatformPose) -> Vector3<f64> {
    Vector3::new(
        wrap_angle(a.alpha - b.alpha),
        wrap_angle(a.beta - b.beta),
        wrap_angle(a.gamma - b.gamma),
    )
}

fn perturbed_pose(
    params: &StructuralParams,
    theta: [f64; 3],
    cfg: &SolverConfig,
) -> Result<PlatformPose, JacobianError> {
    solve_fk(params, &MotorAngles { theta }, cfg)
        .map(|sol| sol.pose)
        .map_err(JacobianError::InfeasiblePerturbation)
}

/// Finite-difference Jacobian of the forward map at `theta`.
///
/// The base point is solved with `cfg` as given; perturbed points are then
/// warm-started from the base swing angles, so the differences inherit the
/// base solve's branch and the solver cost per column stays small. All pose
/// differences are wrapped to (-pi, pi) before dividing by the step.
pub fn jacobian_fd(
    params: &StructuralParams,
    theta: &MotorAngles,
    step: f64,
    scheme: DiffScheme,
    cfg: &SolverConfig,
) -> Result<Matrix3<f64>, JacobianError> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(JacobianError::InvalidInput("step must be in (0, 0.1]"));
    }
    let base = solve_fk(params, theta, cfg)?;
    let warm = SolverConfig {
        initial_guess: InitialGuess::Warm(base.phi),
        ..*cfg
    };
    let mut jac = Matrix3::zeros();
    for col in 0..3 {
        let mut hi = theta.theta;
        hi[col] += step;
        let pose_hi = perturbed_pose(params, hi, &warm)?;
        let column = match scheme {
            DiffScheme::Forward => pose_delta(&pose_hi, &base.pose) / step,
            DiffScheme::Central => {
                let mut lo = theta.theta;
                lo[col] -= step;
                let pose_lo = perturbed_pose(params, lo, &warm)?;
                pose_delta(&pose_hi, &pose_lo) / (2.0 * step)
            }
        };
        jac.set_column(col, &column);
    }
    Ok(jac)
}

/// High-accuracy Jacobian reference at `theta`.
///
/// Two levels of Richardson extrapolation over central differences at steps
/// 1e-3, 5e-4 and 2.5e-4, with every solve fully refined, cancel the
/// truncation error through fourth order; what remains is solver noise of
/// roughly 1e-9. Use it to judge single-step estimates, not in control
/// loops (it costs seven forward solves).
pub fn jacobian_oracle(
    params: &StructuralParams,
    theta: &MotorAngles,
) -> Result<Matrix3<f64>, JacobianError> {
    let cfg = SolverConfig::default();
    let d1 = jacobian_fd(params, theta, 1e-3, DiffScheme::Central, &cfg)?;
    let d2 = jacobian_fd(params, theta, 5e-4, DiffScheme::Central, &cfg)?;
    let d3 = jacobian_fd(params, theta, 2.5e-4, DiffScheme::Central, &cfg)?;
    let e1 = (d2 * 4.0 - d1) / 3.0;
    let e2 = (d3 * 4.0 - d2) / 3.0;
    Ok((e2 * 16.0 - e1) / 15.0)
}

/// Ratio of extreme singular values of a Jacobian.
///
/// # Errors
/// `SingularMatrix` when the smallest singular value is below 1e-12.
pub fn condition_number(jac: &Matrix3<f64>) -> Result<f64, JacobianError> {
    let sv = jac.svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > 1e-12) {
        return Err(JacobianError::SingularMatrix);
    }
    Ok(smax / smin)
}

/// Result of a step-size study; one entry per candidate step, in the order
/// given.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub steps: Vec<f64>,
    /// Worst matrix-entry error against the reference over the whole path.
    pub max_error: Vec<f64>,
    /// Root-mean-square over path points of the per-point worst entry error.
    pub rmse: Vec<f64>,
    /// Step with the smallest RMSE.
    pub argmin_step: f64,
    /// How the reference Jacobians were produced.
    pub reference: String,
}

impl SweepReport {
    /// CSV rendering with header `step,max_error,rmse`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,max_error,rmse\n");
        for i in 0..self.steps.len() {
            out.push_str(&format!(
                "{:.8e},{:.8e},{:.8e}\n",
                self.steps[i], self.max_error[i], self.rmse[i]
            ));
        }
        out
    }
}

/// Accuracy of forward-difference Jacobians along a motor path, as a
/// function of the step size.
///
/// For each path point a reference Jacobian comes from `jacobian_oracle`,
/// and the path is walked once per candidate step with unrefined solves at
/// `fk_tolerance`, warm-started along the path the way a control loop would
/// run them. Large steps lose accuracy to truncation, small steps to solver
/// noise amplified by the division, so the error curve is U-shaped with a
/// floor set by `fk_tolerance`; the returned `argmin_step` is the measured
/// sweet spot.
///
/// Steps must be strictly decreasing, each in (0, 0.1].
pub fn step_size_sweep(
    params: &StructuralParams,
    path: &[MotorAngles],
    steps: &[f64],
    fk_tolerance: f64,
) -> Result<SweepReport, JacobianError> {
    if path.is_empty() {
        return Err(JacobianError::InvalidInput("path must not be empty"));
    }
    if steps.is_empty() {
        return Err(JacobianError::InvalidInput("steps must not be empty"));
    }
    if steps.iter().any(|s| !(*s > 0.0 && *s <= 0.1)) {
        return Err(JacobianError::InvalidInput("every step must be in (0, 0.1]"));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(JacobianError::InvalidInput("steps must be strictly decreasing"));
    }
    if !(fk_tolerance > 0.0 && fk_tolerance.is_finite()) {
        return Err(JacobianError::InvalidInput("fk_tolerance must be positive"));
    }

    let mut references = Vec::with_capacity(path.len());
    for theta in path {
        references.push(jacobian_oracle(params, theta)?);
    }

    let raw = SolverConfig {
        tolerance: fk_tolerance,
        refine: false,
        ..SolverConfig::default()
    };
    let mut max_error = vec![0.0f64; steps.len()];
    let mut sum_sq = vec![0.0f64; steps.len()];
    let mut guess = InitialGuess::Home;
    for (theta, reference) in path.iter().zip(&references) {
        let base = solve_fk(
            params,
            theta,
            &SolverConfig {
                initial_guess: guess,
                ..raw
            },
        )?;
        guess = InitialGuess::Warm(base.phi);
        let warm = SolverConfig {
            initial_guess: InitialGuess::Warm(base.phi),
            ..raw
        };
        for (i, &step) in steps.iter().enumerate() {
            let mut jac = Matrix3::zeros();
            for col in 0..3 {
                let mut hi = theta.theta;
                hi[col] += step;
                let pose_hi = perturbed_pose(params, hi, &warm)?;
                jac.set_column(col, &(pose_delta(&pose_hi, &base.pose) / step));
            }
            let err = (jac - reference).abs().max();
            max_error[i] = max_error[i].max(err);
            sum_sq[i] += err * err;
        }
    }
    let n = path.len() as f64;
    let rmse: Vec<f64> = sum_sq.iter().map(|s| (s / n).sqrt()).collect();
    let mut best = 0;
    for i in 1..steps.len() {
        if rmse[i] < rmse[best] {
            best = i;
        }
    }
    Ok(SweepReport {
        steps: steps.to_vec(),
        max_error,
        rmse,
        argmin_step: steps[best],
        reference: String::from(
            "Richardson-extrapolated central differences over refined solves",
        ),
    })
}

/// The standard study path: motors 1 and 2 held at home, motor 3 swept from
/// its home angle through a sixth of a turn in 1000 equal increments.
pub fn default_sweep_path() -> Vec<MotorAngles> {
    let home = crate::geometry::home_motor_angles();
    (0..=1000)
        .map(|k| {
            MotorAngles::new(
                home.theta[0],
                home.theta[1],
                home.theta[2] + k as f64 * std::f64::consts::PI / 3000.0,
            )
        })
        .collect()
}

/// Candidate steps for `step_size_sweep`: decades from 1e-1 down to 1e-7.
pub fn default_sweep_steps() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7]
}
