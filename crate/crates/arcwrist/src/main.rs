//! Thin command-line shell over the library: each command parses flags,
//! calls one library entry point and serializes the result.
//!
//! Exit codes: 0 success, 2 bad input, 3 solver failure, 4 unreachable pose.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use arcwrist::{
    circular_trajectory, condition_number, default_sweep_path, is_reachable, jacobian_fd,
    sample_workspace, simulate_tracking, solve_fk, solve_link_parameters,
    step_size_sweep, workspace_to_csv, DiffScheme, JacobianError, KinematicsError, MotorAngles,
    PlatformPose, Reachability, SolverConfig, StructuralParams, TrajectorySpec, WorkspaceError,
    WorkspaceLimit,
};

const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_REACH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "arcwrist",
    version,
    about = "Kinematics toolkit for a three-motor parallel wrist",
    after_help = "Structural parameters default to the reference prototype \
                  (r1 = 27.35, r2 = 30, h = 27.35, rl = 25, all mm); \
                  override with --params."
)]
struct Cli {
    /// JSON file with structural parameters: {"r1":..,"r2":..,"h":..,"rl":..} in mm
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,
    /// Unit for angle inputs and scalar angle outputs (CSV artifacts stay in radians)
    #[arg(long, global = true, value_enum, default_value = "rad")]
    unit: Unit,
    /// Write the primary payload to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Payload format, where a command supports both
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the link design equations for a parameter set
    #[command(after_help = "Output JSON: r1, r2, h, rl, theta0, l1, l2.")]
    Params {
        /// Lower joint circle radius, mm
        #[arg(long)]
        r1: f64,
        /// Platform attachment sphere radius, mm
        #[arg(long)]
        r2: f64,
        /// Sphere center height above the motor plane, mm
        #[arg(long)]
        h: f64,
        /// Arc linkage radius, mm
        #[arg(long)]
        rl: f64,
    },
    /// Forward kinematics: motor angles to platform attitude
    #[command(after_help = "Output JSON: pose{alpha,beta,gamma}, phi[3], \
                            upper_points[3][3] (mm), residual_norm, iterations, \
                            gimbal_proximity.")]
    Fk {
        /// The three motor angles
        #[arg(long, num_args = 3, value_names = ["THETA1", "THETA2", "THETA3"], allow_negative_numbers = true)]
        theta: Vec<f64>,
    },
    /// Inverse kinematics: platform attitude to motor angles
    #[command(after_help = "Output JSON: theta[3], phi[3]. The pose must lie \
                            inside the motion bound (pitch-roll radius < 0.7 rad).")]
    Ik {
        /// Yaw, pitch, roll
        #[arg(long, num_args = 3, value_names = ["ALPHA", "BETA", "GAMMA"], allow_negative_numbers = true)]
        rpy: Vec<f64>,
    },
    /// Finite-difference Jacobian at a point, or a step-size study
    #[command(after_help = "Matrix mode output JSON: jacobian[3][3] (rad/rad), \
                            condition_number, step, scheme. The step is always \
                            in radians.")]
    Jacobian {
        /// Motor angles of the evaluation point
        #[arg(long, num_args = 3, value_names = ["THETA1", "THETA2", "THETA3"], allow_negative_numbers = true)]
        theta: Option<Vec<f64>>,
        /// Difference step, rad
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, value_enum, default_value = "forward")]
        scheme: SchemeArg,
        #[command(subcommand)]
        sweep: Option<JacobianSub>,
    },
    /// Circular pitch/roll trajectory, with optional delay-model tracking report
    #[command(after_help = "Writes the trajectory CSV (always radians) to \
                            --output, or stdout without it; the JSON summary \
                            goes to stdout, or stderr when the CSV occupies \
                            stdout. With --delay the CSV gains state columns \
                            and the summary gains the tracking report.")]
    Trajectory {
        /// Circle radius in the pitch/roll plane, rad
        #[arg(long, default_value_t = 0.68)]
        amplitude: f64,
        /// Revolution period, s
        #[arg(long, default_value_t = 4.0)]
        period: f64,
        /// Samples per second, Hz
        #[arg(long, default_value_t = 100.0)]
        rate: f64,
        /// Number of revolutions
        #[arg(long, default_value_t = 1)]
        cycles: u32,
        /// Transport delay for the tracking simulation, s
        #[arg(long)]
        delay: Option<f64>,
    },
    /// Reachability map over the pitch/roll grid
    #[command(after_help = "Writes the grid CSV (always radians) to --output, \
                            or stdout without it; the JSON summary goes to \
                            stdout, or stderr when the CSV occupies stdout.")]
    Workspace {
        /// Grid node spacing, rad
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
    },
}

#[derive(Subcommand)]
enum JacobianSub {
    /// Step-size accuracy study along the standard motor path
    #[command(after_help = "Output: steps, max_error, rmse, argmin_step, \
                            reference, as JSON or CSV per --format.")]
    Sweep {
        /// Comma list (1e-2,1e-3) or decade range (1e-1..1e-7), rad
        #[arg(long, default_value = "1e-1..1e-7")]
        steps: String,
        /// Solver tolerance for the unrefined study solves
        #[arg(long = "fk-tol", default_value_t = 1e-8)]
        fk_tol: f64,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Unit {
    Rad,
    Deg,
}

impl Unit {
    fn parse_angle(self, x: f64) -> f64 {
        match self {
            Unit::Rad => x,
            Unit::Deg => x.to_radians(),
        }
    }

    fn print_angle(self, x: f64) -> f64 {
        match self {
            Unit::Rad => x,
            Unit::Deg => x.to_degrees(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Forward,
    Central,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn kinematics_exit_code(err: &KinematicsError) -> u8 {
    match err {
        KinematicsError::InvalidConfig(_) => EXIT_INPUT,
        KinematicsError::UnreachablePose { .. } | KinematicsError::BranchViolation { .. } => {
            EXIT_REACH
        }
        _ => EXIT_SOLVER,
    }
}

fn kinematics_fail(err: KinematicsError) -> Failure {
    fail(kinematics_exit_code(&err), err.to_string())
}

fn jacobian_fail(err: JacobianError) -> Failure {
    let code = match &err {
        JacobianError::InvalidInput(_) => EXIT_INPUT,
        JacobianError::FkFailure(k) | JacobianError::InfeasiblePerturbation(k) => {
            kinematics_exit_code(k)
        }
        JacobianError::SingularMatrix => EXIT_SOLVER,
    };
    fail(code, err.to_string())
}

fn workspace_fail(err: WorkspaceError) -> Failure {
    let code = match &err {
        WorkspaceError::IkFailure { .. } => EXIT_SOLVER,
        _ => EXIT_INPUT,
    };
    fail(code, err.to_string())
}

fn load_params(path: &Option<PathBuf>) -> Result<StructuralParams, Failure> {
    let Some(path) = path else {
        return Ok(StructuralParams::prototype());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: not valid JSON: {e}", path.display())))?;
    let field = |key: &str| {
        value
            .get(key)
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| {
                fail(
                    EXIT_INPUT,
                    format!("{}: missing numeric field \"{key}\"", path.display()),
                )
            })
    };
    solve_link_parameters(field("r1")?, field("r2")?, field("h")?, field("rl")?)
        .map_err(|e| fail(EXIT_INPUT, e.to_string()))
}

fn emit(output: &Option<PathBuf>, payload: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, payload)
            .map_err(|e| fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serialization");
    s.push('\n');
    s
}

fn angles3(values: &[f64], unit: Unit) -> [f64; 3] {
    [
        unit.parse_angle(values[0]),
        unit.parse_angle(values[1]),
        unit.parse_angle(values[2]),
    ]
}

fn print_angles3(values: &[f64; 3], unit: Unit) -> Vec<f64> {
    values.iter().map(|&x| unit.print_angle(x)).collect()
}

fn parse_sweep_steps(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = |msg: String| fail(EXIT_INPUT, msg);
    if let Some((lo_text, hi_text)) = text.split_once("..") {
        let start: f64 = lo_text
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse step \"{lo_text}\"")))?;
        let end: f64 = hi_text
            .trim()
            .parse()
            .map_err(|_| bad(format!("cannot parse step \"{hi_text}\"")))?;
        if !(start > 0.0 && end > 0.0 && start > end) {
            return Err(bad(format!(
                "step range must run from large to small, got {start} to {end}"
            )));
        }
        let mut steps = Vec::new();
        let mut s = start;
        while s >= end * (1.0 - 1e-9) {
            steps.push(s);
            s /= 10.0;
            if steps.len() > 64 {
                return Err(bad("step range spans too many decades".into()));
            }
        }
        Ok(steps)
    } else {
        text.split(',')
            .map(|piece| {
                piece
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("cannot parse step \"{piece}\"")))
            })
            .collect()
    }
}

/// Payload routing for the two CSV-artifact commands: the CSV goes to
/// --output (or stdout), the JSON summary to stdout (or stderr when the CSV
/// occupies stdout).
fn emit_csv_with_summary(
    output: &Option<PathBuf>,
    csv: &str,
    summary: &serde_json::Value,
) -> Result<(), Failure> {
    emit(output, csv)?;
    if output.is_some() {
        print!("{}", pretty(summary));
    } else {
        eprint!("{}", pretty(summary));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Params { r1, r2, h, rl } => {
            let params =
                solve_link_parameters(r1, r2, h, rl).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
            let doc = json!({
                "r1": params.r1(),
                "r2": params.r2(),
                "h": params.h(),
                "rl": params.rl(),
                "theta0": cli.unit.print_angle(params.theta0()),
                "l1": params.l1(),
                "l2": params.l2(),
            });
            emit(&cli.output, &pretty(&doc))
        }

        Command::Fk { theta } => {
            let params = load_params(&cli.params)?;
            let theta = MotorAngles {
                theta: angles3(&theta, cli.unit),
            };
            let sol =
                solve_fk(&params, &theta, &SolverConfig::default()).map_err(kinematics_fail)?;
            let doc = json!({
                "pose": {
                    "alpha": cli.unit.print_angle(sol.pose.alpha),
                    "beta": cli.unit.print_angle(sol.pose.beta),
                    "gamma": cli.unit.print_angle(sol.pose.gamma),
                },
                "phi": print_angles3(&sol.phi.phi, cli.unit),
                "upper_points": sol.upper_points.iter()
                    .map(|p| vec![p.x, p.y, p.z])
                    .collect::<Vec<_>>(),
                "residual_norm": sol.residual_norm,
                "iterations": sol.iterations,
                "gimbal_proximity": sol.gimbal_proximity,
            });
            emit(&cli.output, &pretty(&doc))
        }

        Command::Ik { rpy } => {
            let params = load_params(&cli.params)?;
            let r = angles3(&rpy, cli.unit);
            let pose = PlatformPose::new(r[0], r[1], r[2]);
            match is_reachable(&params, &pose, &WorkspaceLimit::default()) {
                Reachability::Reachable { theta, phi } => {
                    let doc = json!({
                        "theta": print_angles3(&theta.theta, cli.unit),
                        "phi": print_angles3(&phi.phi, cli.unit),
                    });
                    emit(&cli.output, &pretty(&doc))
                }
                Reachability::BeyondMotionBound { radius, limit } => Err(fail(
                    EXIT_REACH,
                    format!(
                        "pose outside the motion bound: pitch-roll radius \
                         {radius:.4} rad is not below the {limit} rad limit"
                    ),
                )),
                Reachability::IkFailure { source } => {
                    Err(fail(EXIT_REACH, source.to_string()))
                }
            }
        }

        Command::Jacobian {
            theta,
            step,
            scheme,
            sweep,
        } => {
            let params = load_params(&cli.params)?;
            match (theta, sweep) {
                (Some(_), Some(_)) => Err(fail(
                    EXIT_INPUT,
                    "pass either --theta for a point Jacobian or the sweep subcommand, not both",
                )),
                (None, None) => Err(fail(
                    EXIT_INPUT,
                    "pass --theta for a point Jacobian or the sweep subcommand",
                )),
                (Some(theta), None) => {
                    let theta = MotorAngles {
                        theta: angles3(&theta, cli.unit),
                    };
                    let scheme = match scheme {
                        SchemeArg::Forward => DiffScheme::Forward,
                        SchemeArg::Central => DiffScheme::Central,
                    };
                    let jac = jacobian_fd(&params, &theta, step, scheme, &SolverConfig::default())
                        .map_err(jacobian_fail)?;
                    let cond = condition_number(&jac).map_err(jacobian_fail)?;
                    let doc = json!({
                        "jacobian": (0..3).map(|i| vec![jac[(i, 0)], jac[(i, 1)], jac[(i, 2)]])
                            .collect::<Vec<_>>(),
                        "condition_number": cond,
                        "step": step,
                        "scheme": match scheme {
                            DiffScheme::Forward => "forward",
                            DiffScheme::Central => "central",
                        },
                    });
                    emit(&cli.output, &pretty(&doc))
                }
                (None, Some(JacobianSub::Sweep { steps, fk_tol })) => {
                    let steps = parse_sweep_steps(&steps)?;
                    let report = step_size_sweep(&params, &default_sweep_path(), &steps, fk_tol)
                        .map_err(jacobian_fail)?;
                    let payload = match cli.format {
                        Format::Csv => report.to_csv(),
                        Format::Json => pretty(&json!({
                            "steps": report.steps,
                            "max_error": report.max_error,
                            "rmse": report.rmse,
                            "argmin_step": report.argmin_step,
                            "reference": report.reference,
                        })),
                    };
                    emit(&cli.output, &payload)
                }
            }
        }

        Command::Trajectory {
            amplitude,
            period,
            rate,
            cycles,
            delay,
        } => {
            let params = load_params(&cli.params)?;
            let spec = TrajectorySpec {
                amplitude,
                period,
                sample_rate: rate,
                cycles,
            };
            let mut traj = circular_trajectory(&params, &spec).map_err(workspace_fail)?;
            let report = match delay {
                Some(delay) => Some(simulate_tracking(&mut traj, delay).map_err(workspace_fail)?),
                None => None,
            };
            let summary = json!({
                "samples": traj.samples.len(),
                "amplitude": spec.amplitude,
                "period": spec.period,
                "sample_rate": spec.sample_rate,
                "cycles": spec.cycles,
                "report": report.map(|r| json!({
                    "delay": r.delay,
                    "zero_crossing_error": r.zero_crossing_error,
                    "max_error": r.max_error,
                    "rmse": r.rmse,
                })),
            });
            emit_csv_with_summary(&cli.output, &traj.to_csv(), &summary)
        }

        Command::Workspace { resolution } => {
            let params = load_params(&cli.params)?;
            let samples = sample_workspace(&params, resolution).map_err(workspace_fail)?;
            let feasible = samples.iter().filter(|s| s.feasible).count();
            let max_radius = samples
                .iter()
                .filter(|s| s.feasible)
                .map(|s| s.beta.hypot(s.gamma))
                .fold(0.0f64, f64::max);
            let summary = json!({
                "nodes": samples.len(),
                "feasible": feasible,
                "feasible_fraction": feasible as f64 / samples.len() as f64,
                "max_feasible_radius": max_radius,
                "resolution": resolution,
            });
            emit_csv_with_summary(&cli.output, &workspace_to_csv(&samples), &summary)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
