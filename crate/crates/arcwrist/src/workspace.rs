//! Workspace feasibility, circular test trajectories and the pure-delay
//! tracking-error simulation.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{LinkageAngles, MotorAngles, PlatformPose, StructuralParams};
use crate::kinematics::{solve_ik, KinematicsError};

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("invalid trajectory spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid delay: {0}")]
    InvalidDelay(&'static str),
    #[error("invalid grid resolution: {0}")]
    InvalidResolution(&'static str),
    #[error("inverse kinematics failed at t = {t} s: {source}")]
    IkFailure {
        t: f64,
        #[source]
        source: KinematicsError,
    },
}

/// Motion-range bound on the attitude: pitch and roll must satisfy
/// beta^2 + gamma^2 < radius^2, strictly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceLimit {
    pub radius: f64,
}

impl Default for WorkspaceLimit {
    fn default() -> Self {
        Self { radius: 0.7 }
    }
}

/// Outcome of a reachability query, with the diagnostic attached.
#[derive(Debug)]
pub enum Reachability {
    /// Pose is inside the motion bound and the inverse solve produced a
    /// configuration on the operating branch.
    Reachable {
        theta: MotorAngles,
        phi: LinkageAngles,
    },
    /// Pitch/roll radius meets or exceeds the bound; the boundary itself is
    /// excluded.
    BeyondMotionBound { radius: f64, limit: f64 },
    /// Inside the bound but the inverse solve failed.
    IkFailure { source: KinematicsError },
}

impl Reachability {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Reachability::Reachable { .. })
    }
}

/// Checks whether `pose` is inside the motion bound and actually solvable.
pub fn is_reachable(
    params: &StructuralParams,
    pose: &PlatformPose,
    limit: &WorkspaceLimit,
) -> Reachability {
    let radius = pose.beta.hypot(pose.gamma);
    if !(radius < limit.radius) {
        return Reachability::BeyondMotionBound {
            radius,
            limit: limit.radius,
        };
    }
    match solve_ik(params, pose) {
        Ok((theta, phi)) => Reachability::Reachable { theta, phi },
        Err(source) => Reachability::IkFailure { source },
    }
}

/// A circular pitch/roll trajectory: radius `amplitude`, one revolution per
/// `period`, sampled at `sample_rate` for `cycles` revolutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    /// Circle radius in the pitch/roll plane, rad.
    pub amplitude: f64,
    /// Revolution period, s.
    pub period: f64,
    /// Samples per second, Hz.
    pub sample_rate: f64,
    /// Number of revolutions.
    pub cycles: u32,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self {
            amplitude: 0.68,
            period: 4.0,
            sample_rate: 100.0,
            cycles: 1,
        }
    }
}

impl TrajectorySpec {
    pub fn new(
        amplitude: f64,
        period: f64,
        sample_rate: f64,
        cycles: u32,
    ) -> Result<Self, WorkspaceError> {
        let spec = Self {
            amplitude,
            period,
            sample_rate,
            cycles,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), WorkspaceError> {
        if !(self.amplitude > 0.0 && self.amplitude < WorkspaceLimit::default().radius) {
            return Err(WorkspaceError::InvalidSpec(
                "amplitude must be in (0, 0.7)",
            ));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(WorkspaceError::InvalidSpec("period must be positive"));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(WorkspaceError::InvalidSpec("sample_rate must be positive"));
        }
        if self.cycles < 1 {
            return Err(WorkspaceError::InvalidSpec("cycles must be at least 1"));
        }
        Ok(())
    }

    /// Commanded pose at time `t`: t = 0 starts at (pitch, roll) =
    /// (amplitude, 0) and runs counterclockwise.
    pub fn pose_at(&self, t: f64) -> PlatformPose {
        let phase = 2.0 * PI * t / self.period;
        PlatformPose::new(
            0.0,
            self.amplitude * phase.cos(),
            self.amplitude * phase.sin(),
        )
    }
}

/// One trajectory instant: the commanded pose, the motor command that
/// realizes it, and (after `simulate_tracking`) the delayed state pose.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose_cmd: PlatformPose,
    pub theta_cmd: MotorAngles,
    pub pose_state: Option<PlatformPose>,
}

/// A sampled trajectory plus the spec that generated it, so the delay model
/// can evaluate the command off the sample grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: TrajectorySpec,
    pub samples: Vec<TrajectorySample>,
}

/// Tracking errors of the pure-transport-delay model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingErrorReport {
    pub delay: f64,
    /// Command-state error magnitude at the instants where the commanded
    /// pitch or roll crosses zero.
    pub zero_crossing_error: f64,
    pub max_error: f64,
    pub rmse: f64,
}

/// Generates the circular trajectory and solves the motor command for every
/// sample. Sample k sits at t = k / sample_rate, closed at both ends, so a
/// run covers cycles * period seconds inclusive.
pub fn circular_trajectory(
    params: &StructuralParams,
    spec: &TrajectorySpec,
) -> Result<Trajectory, WorkspaceError> {
    spec.validate()?;
    let n = (spec.sample_rate * spec.period * spec.cycles as f64).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 / spec.sample_rate;
        let pose_cmd = spec.pose_at(t);
        let (theta_cmd, _) =
            solve_ik(params, &pose_cmd).map_err(|source| WorkspaceError::IkFailure { t, source })?;
        samples.push(TrajectorySample {
            t,
            pose_cmd,
            theta_cmd,
            pose_state: None,
        });
    }
    Ok(Trajectory {
        spec: *spec,
        samples,
    })
}

fn error_magnitude(cmd: &PlatformPose, state: &PlatformPose) -> f64 {
    let da = cmd.alpha - state.alpha;
    let db = cmd.beta - state.beta;
    let dg = cmd.gamma - state.gamma;
    (da * da + db * db + dg * dg).sqrt()
}

/// Applies the pure transport-delay model pose_state(t) = pose_cmd(t - delay)
/// to every sample (filling `pose_state` in place) and reports the tracking
/// errors.
///
/// For a circular command the error magnitude is the constant chord
/// 2 A sin(pi delay / T), so all three reported figures coincide up to
/// rounding; they are measured from the samples regardless, not assumed.
pub fn simulate_tracking(
    traj: &mut Trajectory,
    delay: f64,
) -> Result<TrackingErrorReport, WorkspaceError> {
    if !(delay >= 0.0) || !delay.is_finite() {
        return Err(WorkspaceError::InvalidDelay("delay must be nonnegative"));
    }
    if delay >= traj.spec.period {
        return Err(WorkspaceError::InvalidDelay(
            "delay must be below one period",
        ));
    }
    if traj.samples.is_empty() {
        return Err(WorkspaceError::InvalidSpec("trajectory has no samples"));
    }

    let mut max_error = 0.0f64;
    let mut sum_sq = 0.0f64;
    for sample in traj.samples.iter_mut() {
        let state = traj.spec.pose_at(sample.t - delay);
        let err = error_magnitude(&sample.pose_cmd, &state);
        max_error = max_error.max(err);
        sum_sq += err * err;
        sample.pose_state = Some(state);
    }
    let rmse = (sum_sq / traj.samples.len() as f64).sqrt();

    // Error at the command zero crossings of pitch and roll: between two
    // samples bracketing a sign change, take the one nearer the axis.
    let mut zero_crossing_error = 0.0f64;
    let mut found = false;
    let component = |pose: &PlatformPose, c: usize| if c == 0 { pose.beta } else { pose.gamma };
    for c in 0..2 {
        for pair in traj.samples.windows(2) {
            let (a, b) = (component(&pair[0].pose_cmd, c), component(&pair[1].pose_cmd, c));
            if a == 0.0 || a.signum() != b.signum() {
                let at = if a.abs() <= b.abs() { &pair[0] } else { &pair[1] };
                let err = error_magnitude(&at.pose_cmd, at.pose_state.as_ref().unwrap());
                zero_crossing_error = zero_crossing_error.max(err);
                found = true;
            }
        }
    }
    if !found {
        zero_crossing_error = max_error;
    }

    Ok(TrackingErrorReport {
        delay,
        zero_crossing_error,
        max_error,
        rmse,
    })
}

/// One node of the reachability map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceSample {
    pub beta: f64,
    pub gamma: f64,
    pub feasible: bool,
    /// Feasible yaw interval at this node; [0, 0] when infeasible.
    pub alpha_min: f64,
    pub alpha_max: f64,
}

/// Evaluates reachability on a square pitch/roll grid over [-0.8, 0.8] with
/// the given node spacing, nodes at integer multiples of the resolution.
///
/// Yaw enters the inverse map only as a common offset on the motor angles
/// (the swing angles do not depend on it), so a node that is feasible at
/// alpha = 0 is feasible for every yaw; the probe angles confirm that and
/// the feasible interval is reported as [-pi, pi]. Output is sorted by
/// (beta, gamma).
pub fn sample_workspace(
    params: &StructuralParams,
    grid_resolution: f64,
) -> Result<Vec<WorkspaceSample>, WorkspaceError> {
    if !(grid_resolution > 0.0 && grid_resolution <= 0.8) {
        return Err(WorkspaceError::InvalidResolution(
            "grid resolution must be in (0, 0.8]",
        ));
    }
    let n = (0.8 / grid_resolution + 1e-9).floor() as i64;
    let limit = WorkspaceLimit::default();
    let mut samples = Vec::with_capacity(((2 * n + 1) * (2 * n + 1)) as usize);
    for i in -n..=n {
        let beta = i as f64 * grid_resolution;
        for j in -n..=n {
            let gamma = j as f64 * grid_resolution;
            let node = PlatformPose::new(0.0, beta, gamma);
            let feasible = is_reachable(params, &node, &limit).is_reachable()
                && [-PI, -PI / 2.0, PI / 2.0, PI].iter().all(|&alpha| {
                    solve_ik(params, &PlatformPose::new(alpha, beta, gamma)).is_ok()
                });
            let (alpha_min, alpha_max) = if feasible { (-PI, PI) } else { (0.0, 0.0) };
            samples.push(WorkspaceSample {
                beta,
                gamma,
                feasible,
                alpha_min,
                alpha_max,
            });
        }
    }
    Ok(samples)
}

impl Trajectory {
    /// CSV rendering: `t,alpha_cmd,beta_cmd,gamma_cmd,theta1,theta2,theta3`,
    /// extended with `alpha_state,beta_state,gamma_state` once every sample
    /// carries a delay-model state.
    pub fn to_csv(&self) -> String {
        let with_state = !self.samples.is_empty()
            && self.samples.iter().all(|s| s.pose_state.is_some());
        let mut out = String::from("t,alpha_cmd,beta_cmd,gamma_cmd,theta1,theta2,theta3");
        if with_state {
            out.push_str(",alpha_state,beta_state,gamma_state");
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
                s.t,
                s.pose_cmd.alpha,
                s.pose_cmd.beta,
                s.pose_cmd.gamma,
                s.theta_cmd.theta[0],
                s.theta_cmd.theta[1],
                s.theta_cmd.theta[2],
            ));
            if with_state {
                let st = s.pose_state.as_ref().unwrap();
                out.push_str(&format!(
                    ",{:.8e},{:.8e},{:.8e}",
                    st.alpha, st.beta, st.gamma
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// CSV rendering of a workspace map: `beta,gamma,feasible,alpha_min,alpha_max`
/// with feasible as 1 or 0.
pub fn workspace_to_csv(samples: &[WorkspaceSample]) -> String {
    let mut out = String::from("beta,gamma,feasible,alpha_min,alpha_max\n");
    for s in samples {
        out.push_str(&format!(
            "{:.8e},{:.8e},{},{:.8e},{:.8e}\n",
            s.beta,
            s.gamma,
            if s.feasible { 1 } else { 0 },
            s.alpha_min,
            s.alpha_max
        ));
    }
    out
}
