//! Forward and inverse kinematics of the wrist.
//!
//! Forward kinematics finds the swing angles that satisfy the platform
//! rigidity constraints for given motor angles (the three platform
//! attachment vectors must keep their pairwise 120-degree separation on the
//! sphere), then reconstructs the attitude from the attachment points.
//! Inverse kinematics is closed-form: rotate the home attachment points by
//! the commanded attitude and read each limb's swing and motor angle back
//! from its point.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::geometry::{
    upper_attachment_home, LinkageAngles, MotorAngles, PlatformPose, RotationMatrix,
    StructuralParams, Vec3, HOME_AZIMUTH,
};

/// Swing-angle magnitude beyond which the arc linkage would fold past the
/// platform plane, leaving the operating branch.
const BRANCH_LIMIT: f64 = PI / 2.0;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("no convergence after {iterations} iterations, residual {residual:e}")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("solver iterate left the operating branch twice")]
    BranchEscape,
    #[error("constraint Jacobian numerically singular")]
    SingularJacobian,
    #[error("pose unreachable: linkage {linkage} needs |sin(phi)| = {ratio} > 1")]
    UnreachablePose { linkage: usize, ratio: f64 },
    #[error("recovered phi = {phi} rad is on the operating-branch boundary")]
    BranchViolation { phi: f64 },
    #[error("attachment points are collinear, no platform plane")]
    DegeneratePlane,
    #[error("points violate the rigid-body invariants, reconstruction not orthonormal")]
    NonOrthonormalResult,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
}

/// Where the forward-kinematics solver starts its swing-angle iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    /// The unswung home configuration, phi = (0, 0, 0). In the convergence
    /// basin for the whole operating workspace.
    Home,
    /// Continuation from a previous solution, for trajectories and sweeps.
    Warm(LinkageAngles),
}

/// Forward-kinematics solver settings.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Accepted bound on the constraint residual norm.
    pub tolerance: f64,
    /// Iteration budget, shared by both solver stages.
    pub max_iterations: usize,
    pub initial_guess: InitialGuess,
    /// Polish the solution through the inverse map to full pose accuracy.
    ///
    /// The residual Newton stage alone determines the attitude only to about
    /// sqrt(tolerance): the constraint system is degenerate at every root
    /// (see `solve_fk`), so the residual is blind to one direction of the
    /// swing-angle error until second order. Leave this on unless you
    /// specifically want the raw residual-driven behavior, e.g. to study the
    /// solver's own noise floor as `step_size_sweep` does.
    pub refine: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
            initial_guess: InitialGuess::Home,
            refine: true,
        }
    }
}

/// A converged forward-kinematics solution.
#[derive(Debug, Clone)]
pub struct FkSolution {
    pub pose: PlatformPose,
    pub phi: LinkageAngles,
    /// Platform attachment points P4, P5, P6 in the base frame, mm.
    pub upper_points: [Vec3; 3],
    /// Norm of the pairwise-angle constraint residual at the solution.
    pub residual_norm: f64,
    /// Newton updates spent, both stages combined.
    pub iterations: usize,
    /// True when the attitude extraction ran inside the gimbal-lock band
    /// (|pitch| within 1e-6 of pi/2); yaw and roll are then not separately
    /// identifiable and the reported roll is 0 by convention.
    pub gimbal_proximity: bool,
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Platform attachment points for given motor and swing angles.
///
/// Each limb's point starts at its home position a quarter turn ahead of the
/// motor and swings by phi_i about the line from the sphere center to the
/// limb's lower joint:
///
/// ```text
/// x = -r2 cos(phi) sin(theta) + r2 sin(phi) cos(theta0) cos(theta)
/// y =  r2 cos(phi) cos(theta) + r2 sin(phi) cos(theta0) sin(theta)
/// z =  r2 sin(phi) sin(theta0) + h
/// ```
pub fn upper_points_from_phi(
    params: &StructuralParams,
    theta: &MotorAngles,
    phi: &LinkageAngles,
) -> [Vec3; 3] {
    let r2 = params.r2();
    let c0 = params.theta0().cos();
    let s0 = params.theta0().sin();
    std::array::from_fn(|i| {
        let (st, ct) = theta.theta[i].sin_cos();
        let (sp, cp) = phi.phi[i].sin_cos();
        Vec3::new(
            -r2 * cp * st + r2 * sp * c0 * ct,
            r2 * cp * ct + r2 * sp * c0 * st,
            r2 * sp * s0 + params.h(),
        )
    })
}

/// Platform rigidity residual: for each pair of attachment vectors from the
/// sphere center, the deviation of their inner product from cos(2pi/3).
///
/// Pair order is (P4,P5), (P4,P6), (P5,P6). The vectors have length r2
/// identically (algebraic property of the swing parameterization), so the
/// residual divides by r2 squared instead of computing norms.
pub fn constraint_residual(
    params: &StructuralParams,
    theta: &MotorAngles,
    phi: &LinkageAngles,
) -> Vector3<f64> {
    let center = Vec3::new(0.0, 0.0, params.h());
    let pts = upper_points_from_phi(params, theta, phi);
    let v: [Vec3; 3] = std::array::from_fn(|i| pts[i] - center);
    let r2s = params.r2() * params.r2();
    Vector3::new(
        v[0].dot(&v[1]) / r2s + 0.5,
        v[0].dot(&v[2]) / r2s + 0.5,
        v[1].dot(&v[2]) / r2s + 0.5,
    )
}

/// Analytic Jacobian of `constraint_residual` with respect to phi.
fn constraint_jacobian(
    params: &StructuralParams,
    theta: &MotorAngles,
    phi: &LinkageAngles,
) -> Matrix3<f64> {
    let center = Vec3::new(0.0, 0.0, params.h());
    let r2 = params.r2();
    let c0 = params.theta0().cos();
    let s0 = params.theta0().sin();
    let pts = upper_points_from_phi(params, theta, phi);
    let v: [Vec3; 3] = std::array::from_fn(|i| pts[i] - center);
    let d: [Vec3; 3] = std::array::from_fn(|i| {
        let (st, ct) = theta.theta[i].sin_cos();
        let (sp, cp) = phi.phi[i].sin_cos();
        Vec3::new(
            r2 * sp * st + r2 * cp * c0 * ct,
            -r2 * sp * ct + r2 * cp * c0 * st,
            r2 * cp * s0,
        )
    });
    let r2s = r2 * r2;
    Matrix3::new(
        d[0].dot(&v[1]) / r2s,
        v[0].dot(&d[1]) / r2s,
        0.0,
        d[0].dot(&v[2]) / r2s,
        0.0,
        v[0].dot(&d[2]) / r2s,
        0.0,
        d[1].dot(&v[2]) / r2s,
        v[1].dot(&d[2]) / r2s,
    )
}

/// One rank-safe Newton step for the residual system.
///
/// The constraint Jacobian is exactly rank 2 at phi = 0 for every theta and
/// again at every root, so a plain LU solve is unusable exactly where the
/// solver starts and ends; small singular values are truncated instead.
fn newton_step(j: &Matrix3<f64>, f: &Vector3<f64>) -> Result<Vector3<f64>, KinematicsError> {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 1e-12) {
        return Err(KinematicsError::SingularJacobian);
    }
    svd.solve(&(-f), 1e-10 * smax)
        .map(|m| Vector3::new(m[0], m[1], m[2]))
        .map_err(|_| KinematicsError::SingularJacobian)
}

struct IterationBudget {
    used: usize,
    max: usize,
}

/// Newton iteration on the residual system down to `tol`, updating `phi` in
/// place. Returns the final residual norm.
fn residual_newton(
    params: &StructuralParams,
    theta: &MotorAngles,
    phi: &mut [f64; 3],
    tol: f64,
    budget: &mut IterationBudget,
    clamped: &mut bool,
) -> Result<f64, KinematicsError> {
    let mut res = constraint_residual(params, theta, &LinkageAngles { phi: *phi });
    while res.norm() > tol {
        if budget.used >= budget.max {
            return Err(KinematicsError::NoConvergence {
                residual: res.norm(),
                iterations: budget.used,
            });
        }
        let j = constraint_jacobian(params, theta, &LinkageAngles { phi: *phi });
        let mut delta = newton_step(&j, &res)?;
        // Keep far-from-home steps from flying across the branch boundary.
        let longest = delta.amax();
        if longest > 0.5 {
            delta *= 0.5 / longest;
        }
        for k in 0..3 {
            phi[k] += delta[k];
        }
        if phi.iter().any(|p| p.abs() >= BRANCH_LIMIT) {
            // Branch policy: clamp the first escape back inside, fail on the
            // second.
            if *clamped {
                return Err(KinematicsError::BranchEscape);
            }
            *clamped = true;
            for p in phi.iter_mut() {
                *p = p.clamp(-(BRANCH_LIMIT - 1e-6), BRANCH_LIMIT - 1e-6);
            }
        }
        budget.used += 1;
        res = constraint_residual(params, theta, &LinkageAngles { phi: *phi });
    }
    Ok(res.norm())
}

/// Motor angles the closed-form inverse map assigns to `pose`, minus the
/// targets, each difference wrapped to (-pi, pi]. None when the pose leaves
/// the inverse map's domain.
fn ik_mismatch(
    params: &StructuralParams,
    pose: &[f64; 3],
    target: &[f64; 3],
) -> Option<Vector3<f64>> {
    let (th, _) = solve_ik(params, &PlatformPose::new(pose[0], pose[1], pose[2])).ok()?;
    Some(Vector3::new(
        wrap_angle(th.theta[0] - target[0]),
        wrap_angle(th.theta[1] - target[1]),
        wrap_angle(th.theta[2] - target[2]),
    ))
}

/// Pose-space polish: Newton on `ik_theta(pose) = theta` seeded by the
/// residual stage, using the machine-exact closed-form inverse map. Returns
/// Ok(None) when the polish cannot run (domain edge, singular inverse-map
/// Jacobian); the caller then falls back to the pure residual iteration.
fn try_refine(
    params: &StructuralParams,
    theta: &MotorAngles,
    phi_seed: [f64; 3],
    budget: &mut IterationBudget,
    cfg: &SolverConfig,
) -> Result<Option<FkSolution>, KinematicsError> {
    const FD_STEP: f64 = 1e-7;
    let target = [
        wrap_angle(theta.theta[0]),
        wrap_angle(theta.theta[1]),
        wrap_angle(theta.theta[2]),
    ];
    // Exit well below the residual tolerance: a motor-angle mismatch of g
    // leaves a residual of the same order, and the caller's residual check
    // must still clear with margin.
    let theta_tol = (cfg.tolerance * 0.05).min(1e-13).max(1e-15);

    let seed_points = upper_points_from_phi(params, theta, &LinkageAngles { phi: phi_seed });
    let rot = reconstruct_rotation(&seed_points, params);
    let (seed_pose, _) = rpy_from_rotation(&rot);
    let mut pose = [seed_pose.alpha, seed_pose.beta, seed_pose.gamma];
    let mut g = match ik_mismatch(params, &pose, &target) {
        Some(g) => g,
        None => return Ok(None),
    };

    while g.amax() > theta_tol {
        if budget.used >= budget.max {
            let (_, phi_now) = solve_ik(params, &PlatformPose::new(pose[0], pose[1], pose[2]))
                .map_err(|_| KinematicsError::NoConvergence {
                    residual: g.norm(),
                    iterations: budget.used,
                })?;
            let res = constraint_residual(params, theta, &phi_now);
            return Err(KinematicsError::NoConvergence {
                residual: res.norm(),
                iterations: budget.used,
            });
        }
        let mut jm = Matrix3::zeros();
        for j in 0..3 {
            let mut probe = pose;
            probe[j] += FD_STEP;
            let gp = match ik_mismatch(params, &probe, &target) {
                Some(gp) => gp,
                None => return Ok(None),
            };
            for i in 0..3 {
                jm[(i, j)] = wrap_angle(gp[i] - g[i]) / FD_STEP;
            }
        }
        let delta = match jm.lu().solve(&(-g)) {
            Some(d) => d,
            None => return Ok(None),
        };
        // Halve the step if it would leave the inverse map's domain.
        let mut scale = 1.0;
        let mut stepped = false;
        let g_prev = g.amax();
        for _ in 0..8 {
            let trial = [
                pose[0] + scale * delta[0],
                pose[1] + scale * delta[1],
                pose[2] + scale * delta[2],
            ];
            if let Some(gt) = ik_mismatch(params, &trial, &target) {
                pose = trial;
                g = gt;
                stepped = true;
                break;
            }
            scale *= 0.5;
        }
        if !stepped {
            return Ok(None);
        }
        budget.used += 1;
        // Rounding floor: once the mismatch is tiny and no longer dropping,
        // more updates only burn budget.
        if g.amax() < 1e-11 && g.amax() > 0.1 * g_prev {
            break;
        }
    }

    let final_pose = PlatformPose::new(pose[0], pose[1], pose[2]);
    let (_, phi) = match solve_ik(params, &final_pose) {
        Ok(sol) => sol,
        Err(_) => return Ok(None),
    };
    if phi.phi.iter().any(|p| p.abs() >= BRANCH_LIMIT) {
        return Ok(None);
    }
    let residual_norm = constraint_residual(params, theta, &phi).norm();
    if residual_norm > cfg.tolerance {
        return Ok(None);
    }
    Ok(Some(build_solution(
        params,
        theta,
        phi.phi,
        residual_norm,
        budget.used,
    )))
}

fn build_solution(
    params: &StructuralParams,
    theta: &MotorAngles,
    phi: [f64; 3],
    residual_norm: f64,
    iterations: usize,
) -> FkSolution {
    let phi = LinkageAngles { phi };
    let upper_points = upper_points_from_phi(params, theta, &phi);
    // The attachment points of a loose solve satisfy the rigidity
    // constraints only to within residual_norm, so the reconstruction is
    // deliberately ungated here; solution quality is what residual_norm
    // reports.
    let rot = reconstruct_rotation(&upper_points, params);
    let (pose, gimbal_proximity) = rpy_from_rotation(&rot);
    FkSolution {
        pose,
        phi,
        upper_points,
        residual_norm,
        iterations,
        gimbal_proximity,
    }
}

/// Forward kinematics: motor angles to platform attitude.
///
/// Stage 1 is Newton iteration on the pairwise-angle residual with the
/// analytic inner Jacobian, started from `cfg.initial_guess`. That system is
/// second-order degenerate at every root: the 120-degree triangle is extremal
/// among triples confined to the three swing circles, so the residual grows
/// only quadratically along one direction away from the solution. Stage 1
/// therefore converges linearly and resolves the attitude no better than
/// about sqrt(tolerance).
///
/// With `cfg.refine` set (the default), a second stage polishes the pose by
/// Newton on the closed-form inverse map, which is regular and quadratically
/// convergent, leaving pose errors near machine precision and a residual
/// norm around 1e-16. The polish is attempted as early as a coarse stage-1
/// residual allows, so warm-started solves along a trajectory typically
/// finish in 3 updates and a cold start from home in about 6. With `refine`
/// off you get the raw stage-1 behavior and `residual_norm` lands just under
/// `cfg.tolerance`.
///
/// # Errors
/// `NoConvergence` when the shared iteration budget runs out, `BranchEscape`
/// when iterates leave the operating branch twice, `SingularJacobian` when
/// the constraint Jacobian collapses entirely.
pub fn solve_fk(
    params: &StructuralParams,
    theta: &MotorAngles,
    cfg: &SolverConfig,
) -> Result<FkSolution, KinematicsError> {
    if !(cfg.tolerance > 0.0) {
        return Err(KinematicsError::InvalidConfig("tolerance must be > 0"));
    }
    if cfg.max_iterations < 1 {
        return Err(KinematicsError::InvalidConfig("max_iterations must be >= 1"));
    }

    let mut phi = match cfg.initial_guess {
        InitialGuess::Home => [0.0; 3],
        InitialGuess::Warm(w) => w.phi,
    };
    let mut budget = IterationBudget {
        used: 0,
        max: cfg.max_iterations,
    };
    let mut clamped = false;

    if cfg.refine {
        // The polish stage only needs a seed inside its basin, so try it
        // from a coarse residual first (a good warm start then spends no
        // stage-1 updates at all) and tighten stage 1 only if the polish
        // declines, which happens when a sloppy seed pose leaves the
        // inverse map's domain near the workspace boundary.
        for rung in [cfg.tolerance.max(1e-2), cfg.tolerance.max(1e-4)] {
            residual_newton(params, theta, &mut phi, rung, &mut budget, &mut clamped)?;
            if let Some(solution) = try_refine(params, theta, phi, &mut budget, cfg)? {
                return Ok(solution);
            }
        }
    }
    let residual_norm = residual_newton(
        params,
        theta,
        &mut phi,
        cfg.tolerance,
        &mut budget,
        &mut clamped,
    )?;
    Ok(build_solution(params, theta, phi, residual_norm, budget.used))
}

/// Normal of the platform plane through the three attachment points, oriented
/// so the home configuration's normal points up (+Z, away from the base).
pub fn platform_normal(upper_points: &[Vec3; 3]) -> Result<Vec3, KinematicsError> {
    let e1 = upper_points[1] - upper_points[0];
    let e2 = upper_points[2] - upper_points[0];
    let n = e2.cross(&e1);
    if !(n.norm() > 1e-9 * e1.norm() * e2.norm()) || e1.norm() == 0.0 || e2.norm() == 0.0 {
        return Err(KinematicsError::DegeneratePlane);
    }
    Ok(n)
}

/// Reconstructs the platform attitude from the three attachment points.
///
/// The home attachment directions from the sphere center are known, so two
/// rotation columns fall out of expressing the current P4 and P5 directions
/// in that basis, and the third is their cross product. Input points that are
/// not a rigid motion of the home triangle (sphere radius or 120-degree
/// separation broken beyond 1e-9) are rejected.
pub fn rotation_from_points(
    upper_points: &[Vec3; 3],
    params: &StructuralParams,
) -> Result<RotationMatrix, KinematicsError> {
    let rot = reconstruct_rotation(upper_points, params);
    let defect = (rot.transpose() * rot - Matrix3::identity()).abs().max();
    if !(defect <= 1e-9) || !((rot.determinant() - 1.0).abs() <= 1e-9) {
        return Err(KinematicsError::NonOrthonormalResult);
    }
    Ok(rot)
}

/// Column construction behind `rotation_from_points`, without the rigidity
/// gate. Used to seed the refinement stage, whose starting points satisfy
/// the constraints only approximately.
fn reconstruct_rotation(upper_points: &[Vec3; 3], params: &StructuralParams) -> RotationMatrix {
    let center = Vec3::new(0.0, 0.0, params.h());
    let r2 = params.r2();
    let v4 = upper_points[0] - center;
    let v5 = upper_points[1] - center;
    let col2 = v4 / r2;
    let azim = HOME_AZIMUTH[1];
    let col1 = (v5 - r2 * azim.cos() * col2) / (-r2 * azim.sin());
    let col3 = col1.cross(&col2);
    Matrix3::from_columns(&[col1, col2, col3])
}

/// RPY extraction: alpha = atan2(R21, R11), beta = atan2(-R31,
/// sqrt(R32^2 + R33^2)), gamma = atan2(R32, R33), with beta in
/// [-pi/2, pi/2].
///
/// The returned flag is true inside the gimbal-lock band (|beta| within 1e-6
/// of pi/2), where yaw and roll are not separately identifiable; the split
/// then favors yaw and reports roll = 0.
pub fn rpy_from_rotation(rot: &RotationMatrix) -> (PlatformPose, bool) {
    let beta = (-rot[(2, 0)]).atan2((rot[(2, 1)].powi(2) + rot[(2, 2)].powi(2)).sqrt());
    if PI / 2.0 - beta.abs() < 1e-6 {
        let alpha = (-rot[(0, 1)]).atan2(rot[(1, 1)]);
        (PlatformPose::new(alpha, beta, 0.0), true)
    } else {
        let alpha = rot[(1, 0)].atan2(rot[(0, 0)]);
        let gamma = rot[(2, 1)].atan2(rot[(2, 2)]);
        (PlatformPose::new(alpha, beta, gamma), false)
    }
}

/// Attitude matrix of an RPY pose, composed as Rz(alpha) Ry(beta) Rx(gamma).
pub fn rotation_from_rpy(pose: &PlatformPose) -> RotationMatrix {
    let (sa, ca) = pose.alpha.sin_cos();
    let (sb, cb) = pose.beta.sin_cos();
    let (sg, cg) = pose.gamma.sin_cos();
    Matrix3::new(
        ca * cb,
        ca * sb * sg - sa * cg,
        ca * sb * cg + sa * sg,
        sa * cb,
        sa * sb * sg + ca * cg,
        sa * sb * cg - ca * sg,
        -sb,
        cb * sg,
        cb * cg,
    )
}

/// Closed-form inverse kinematics: platform attitude to motor angles, with
/// the swing angles as auxiliary output.
///
/// Each home attachment vector is rotated by the commanded attitude; its z
/// component fixes the swing angle via `sin(phi) = z / (r2 sin(theta0))`,
/// and the x, y components then give the motor angle through a 2x2 linear
/// system in (cos(theta), sin(theta)). Motor angles are reported in
/// (-pi, pi].
///
/// # Errors
/// `UnreachablePose` when some limb would need |sin(phi)| > 1,
/// `BranchViolation` when a swing angle lands exactly on the branch boundary.
pub fn solve_ik(
    params: &StructuralParams,
    pose: &PlatformPose,
) -> Result<(MotorAngles, LinkageAngles), KinematicsError> {
    let rot = rotation_from_rpy(pose);
    let r2 = params.r2();
    let c0 = params.theta0().cos();
    let s0 = params.theta0().sin();
    let center = Vec3::new(0.0, 0.0, params.h());
    let mut theta = [0.0; 3];
    let mut phi = [0.0; 3];
    for i in 0..3 {
        let u = upper_attachment_home(params, HOME_AZIMUTH[i]) - center;
        let w = rot * u;
        let s = w.z / (r2 * s0);
        if s.abs() > 1.0 {
            return Err(KinematicsError::UnreachablePose {
                linkage: i + 1,
                ratio: s.abs(),
            });
        }
        let ph = s.asin();
        if ph.abs() >= BRANCH_LIMIT {
            return Err(KinematicsError::BranchViolation { phi: ph });
        }
        let a = r2 * s * c0;
        let b = r2 * ph.cos();
        let den = a * a + b * b;
        let ct = (a * w.x + b * w.y) / den;
        let st = (a * w.y - b * w.x) / den;
        theta[i] = st.atan2(ct);
        phi[i] = ph;
    }
    Ok((MotorAngles { theta }, LinkageAngles { phi }))
}
