//! Kinematics engine for a three-motor parallel wrist whose limbs are
//! arc-shaped linkages.
//!
//! Three motors at the base drive lower linkages on a circle of radius `r1`;
//! each lower linkage carries a 90-degree arc link that swings passively and
//! attaches to a moving platform on a sphere of radius `r2` centered above the
//! base. The platform has no independent translation, so its configuration is
//! a pure attitude, parameterized here as fixed-axis RPY angles
//! (yaw about Z, pitch about Y, roll about X).
//!
//! Capabilities, one module each:
//!
//! - [`geometry`]: structural constants, design-equation synthesis, frame
//!   conventions.
//! - [`kinematics`]: forward kinematics (motor angles to platform attitude)
//!   and closed-form inverse kinematics.
//! - [`jacobian`]: finite-difference Jacobians, a Richardson-extrapolated
//!   oracle, and the step-size error sweep.
//! - [`workspace`]: reachability checks, circular trajectory generation, and
//!   a transport-delay tracking-error simulator.
//!
//! The `examples/` directory holds one runnable example per capability; the
//! `arcwrist` binary exposes the same operations as CLI subcommands.

pub mod geometry;
pub mod jacobian;
pub mod kinematics;
pub mod workspace;

pub use geometry::{
    home_motor_angles, lower_attachment_point, solve_link_parameters, GeometryError,
    LinkageAngles, MotorAngles, PlatformPose, RotationMatrix, StructuralParams, Vec3,
};
pub use jacobian::{
    condition_number, default_sweep_path, default_sweep_steps, jacobian_fd, jacobian_oracle,
    step_size_sweep, DiffScheme, JacobianError, SweepReport,
};
pub use kinematics::{
    constraint_residual, platform_normal, rotation_from_points, rotation_from_rpy,
    rpy_from_rotation, solve_fk, solve_ik, upper_points_from_phi, wrap_angle, FkSolution,
    InitialGuess, KinematicsError, SolverConfig,
};
pub use workspace::{
    circular_trajectory, is_reachable, sample_workspace, simulate_tracking, workspace_to_csv,
    Reachability, TrackingErrorReport, Trajectory, TrajectorySample, TrajectorySpec,
    WorkspaceError, WorkspaceLimit, WorkspaceSample,
};
