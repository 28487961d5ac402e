mod commands;
mod files;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Comfort-aware Pareto motion planning on occupancy grid maps.
#[derive(Debug, Parser)]
#[command(name = "pnav", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the Pareto front of lattice paths between two poses.
    Plan(PlanArgs),
    /// Run the RRT baseline n times and keep the path with the fewest
    /// curvature sign changes.
    Rrt(RrtArgs),
    /// Evaluate (V, N, D) on trajectory files.
    Eval(EvalArgs),
    /// Draw trajectories over a map as SVG.
    Render(RenderArgs),
}

/// Constant-speed execution settings.
#[derive(Debug, Clone, Copy, Args)]
struct Motion {
    /// Translation speed, m/s.
    #[arg(long, env = "PNAV_V", default_value_t = 1.0)]
    v: f64,
    /// Rotation speed, deg/s.
    #[arg(long, env = "PNAV_OMEGA", default_value_t = 90.0)]
    omega: f64,
    /// Sampling tick, seconds.
    #[arg(long, env = "PNAV_DT", default_value_t = 0.05)]
    dt: f64,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long, env = "PNAV_MAP")]
    map: PathBuf,
    /// Start pose `X,Y,TH` in meters and degrees (TH a multiple of 45).
    #[arg(long, env = "PNAV_START", value_parser = files::parse_pose)]
    start: files::Pose,
    /// Goal `X,Y` or `X,Y,TH`.
    #[arg(long, env = "PNAV_GOAL", value_parser = files::parse_pose)]
    goal: files::Pose,
    /// Lattice step, meters. Defaults to twice the map resolution.
    #[arg(long, env = "PNAV_DELTA")]
    delta: Option<f64>,
    /// Robot footprint radius, meters.
    #[arg(long, env = "PNAV_RHO", default_value_t = 0.3)]
    rho: f64,
    /// Camera clearance radius, meters.
    #[arg(long, env = "PNAV_R", default_value_t = 2.0)]
    r: f64,
    #[command(flatten)]
    motion: Motion,
    #[arg(long, env = "PNAV_OUT", default_value = "out")]
    out: PathBuf,
    /// Also write one SVG per front entry and an overlay of all entries.
    #[arg(long, env = "PNAV_SVG")]
    svg: bool,
}

#[derive(Debug, Args)]
struct RrtArgs {
    #[arg(long, env = "PNAV_MAP")]
    map: PathBuf,
    /// Start position `X,Y`; a heading is ignored.
    #[arg(long, env = "PNAV_START", value_parser = files::parse_pose)]
    start: files::Pose,
    #[arg(long, env = "PNAV_GOAL", value_parser = files::parse_pose)]
    goal: files::Pose,
    /// Number of seeded reruns.
    #[arg(long, env = "PNAV_N", default_value_t = 1000)]
    n: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, env = "PNAV_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "PNAV_RHO", default_value_t = 0.3)]
    rho: f64,
    #[arg(long, env = "PNAV_R", default_value_t = 2.0)]
    r: f64,
    /// Steering step, meters. Defaults to twice the map resolution.
    #[arg(long, env = "PNAV_STEP")]
    step: Option<f64>,
    #[arg(long, env = "PNAV_GOAL_BIAS", default_value_t = 0.05)]
    goal_bias: f64,
    #[arg(long, env = "PNAV_MAX_ITERATIONS", default_value_t = 20_000)]
    max_iterations: usize,
    /// Goal tolerance, meters. Defaults to the step.
    #[arg(long, env = "PNAV_GOAL_TOLERANCE")]
    goal_tolerance: Option<f64>,
    #[command(flatten)]
    motion: Motion,
    #[arg(long, env = "PNAV_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, env = "PNAV_MAP")]
    map: PathBuf,
    #[arg(long, env = "PNAV_R", default_value_t = 2.0)]
    r: f64,
    /// Directory for the `<name>.report.json` files. Defaults to the
    /// directory of each trajectory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(required = true)]
    trajectories: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long, env = "PNAV_MAP")]
    map: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Camera clearance radius for the legend costs, meters.
    #[arg(long, env = "PNAV_R", default_value_t = 2.0)]
    r: f64,
    #[arg(required = true)]
    trajectories: Vec<PathBuf>,
}

/// How a command that ran to completion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Solved,
    NoSolution,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Plan(args) => commands::plan(&args),
        Command::Rrt(args) => commands::rrt(&args),
        Command::Eval(args) => commands::eval(&args),
        Command::Render(args) => commands::render(&args),
    };
    match result {
        Ok(Outcome::Solved) => ExitCode::SUCCESS,
        Ok(Outcome::NoSolution) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
