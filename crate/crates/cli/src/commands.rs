use crate::files::{self, FrontFile, FrontRecord, PlanSettings, Pose, RrtFile, TrajectoryFile};
use crate::svg::{self, Layer};
use crate::{EvalArgs, Motion, Outcome, PlanArgs, RenderArgs, RrtArgs};
use anyhow::{anyhow, bail, Context, Result};
use pnav_core::lattice::LatticeGeometry;
use pnav_core::{
    best_of_n, eval_costs, plan_pareto, GoalSpec, Heading, LatticeGraph, LatticeNode, RobotModel,
    RrtParams, SegmentPath, TimedTrajectory, WorkspaceMap,
};
use std::io::Write;
use std::path::{Path, PathBuf};

fn check_motion(m: &Motion) -> Result<()> {
    for (name, value) in [("v", m.v), ("omega", m.omega), ("dt", m.dt)] {
        if !(value.is_finite() && value > 0.0) {
            bail!("--{name} must be positive, got {value}");
        }
    }
    Ok(())
}

/// Snaps a world position to the lattice. `what` names the endpoint in
/// error messages.
fn snap(
    map: &WorkspaceMap,
    geo: &LatticeGeometry,
    pose: &Pose,
    what: &str,
) -> Result<(usize, usize)> {
    let p = pose.position;
    geo.snap(map, p)
        .ok_or_else(|| anyhow!("invalid {what}: ({}, {}) is outside the map", p.x, p.y))
}

fn heading(deg: f64, what: &str) -> Result<Heading> {
    Heading::from_degrees(deg)
        .ok_or_else(|| anyhow!("invalid {what}: heading {deg} is not a multiple of 45 degrees"))
}

pub fn plan(args: &PlanArgs) -> Result<Outcome> {
    check_motion(&args.motion)?;
    let map = files::read_map(&args.map)?;
    let delta = args.delta.unwrap_or(2.0 * map.resolution());
    let model = RobotModel::new(args.rho, args.r)?;
    let graph = LatticeGraph::build(&map, &model, delta)?;
    let geo = *graph.geometry();

    let (sx, sy) = snap(&map, &geo, &args.start, "start")?;
    let start_heading = args
        .start
        .heading_deg
        .ok_or_else(|| anyhow!("invalid start: a heading is required (X,Y,TH)"))?;
    let start = LatticeNode::new(sx, sy, heading(start_heading, "start")?);
    if !graph.contains(&start) {
        bail!(
            "invalid start: ({}, {}) is in collision",
            args.start.position.x,
            args.start.position.y
        );
    }
    let (gx, gy) = snap(&map, &geo, &args.goal, "goal")?;
    let goal = match args.goal.heading_deg {
        Some(deg) => GoalSpec::pose(gx, gy, heading(deg, "goal")?),
        None => GoalSpec::position(gx, gy),
    };

    let front = plan_pareto(&graph, &start, &goal)?;
    let Motion { v, omega, dt } = args.motion;
    let mut entries = Vec::with_capacity(front.len());
    for entry in front.sorted_by_distance() {
        let path = SegmentPath::from_lattice(&graph, &entry.path)?;
        let trajectory = path.to_timed(v, omega, dt)?;
        let report = eval_costs(&trajectory, &map, args.r)
            .with_search_cost(&entry.cost, entry.path.len() - 1);
        entries.push(FrontRecord {
            report,
            cost: entry.cost,
            nodes: entry.path.clone(),
            segments: path.segments,
            trajectory,
        });
    }

    files::create_dir(&args.out)?;
    let file = FrontFile {
        start,
        goal,
        settings: PlanSettings {
            delta,
            rho: args.rho,
            r: args.r,
            v,
            omega_deg: omega,
            dt,
        },
        entries,
    };
    files::write_json(&args.out.join("front.json"), &file)?;
    let mut layers = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for (i, e) in file.entries.iter().enumerate() {
        files::write_json(
            &args.out.join(format!("entry_{i:02}.json")),
            &TrajectoryFile {
                trajectory: e.trajectory.clone(),
                report: e.report.clone(),
            },
        )?;
        let r = &e.report;
        writeln!(
            stdout,
            "entry {i:02}: V={:.6} N={} D={:.6} T={:.3}",
            r.obstruction, r.turns, r.distance, r.duration
        )?;
        layers.push(layer(format!("entry {i:02}"), &e.trajectory, r.clone()));
    }
    if args.svg {
        for (i, l) in layers.iter().enumerate() {
            let one = svg::render(&map, std::slice::from_ref(l));
            files::write_text(&args.out.join(format!("entry_{i:02}.svg")), &one)?;
        }
        files::write_text(&args.out.join("front.svg"), &svg::render(&map, &layers))?;
    }
    if file.entries.is_empty() {
        writeln!(stdout, "no path: the front is empty")?;
        return Ok(Outcome::NoSolution);
    }
    Ok(Outcome::Solved)
}

fn layer(label: String, timed: &TimedTrajectory, report: pnav_core::CostReport) -> Layer {
    Layer {
        label,
        points: timed.positions(),
        rotations: timed.rotation_points(),
        report,
    }
}

pub fn rrt(args: &RrtArgs) -> Result<Outcome> {
    check_motion(&args.motion)?;
    let map = files::read_map(&args.map)?;
    let model = RobotModel::new(args.rho, args.r)?;
    let defaults = RrtParams::defaults_for(&map, args.seed);
    let step_size = args.step.unwrap_or(defaults.step_size);
    let params = RrtParams {
        step_size,
        goal_bias: args.goal_bias,
        max_iterations: args.max_iterations,
        goal_tolerance: args.goal_tolerance.unwrap_or(step_size),
        seed: args.seed,
    };
    let (start, goal) = (args.start.position, args.goal.position);
    for (p, what) in [(start, "start"), (goal, "goal")] {
        if map.world_to_cell(p).is_none() {
            bail!("invalid {what}: ({}, {}) is outside the map", p.x, p.y);
        }
    }
    let best = best_of_n(&map, &model, start, goal, &params, args.n).map_err(|e| match e {
        pnav_core::rrt::RrtError::StartInCollision => {
            anyhow!("invalid start: ({}, {}) is in collision", start.x, start.y)
        }
        pnav_core::rrt::RrtError::GoalInCollision => {
            anyhow!("invalid goal: ({}, {}) is in collision", goal.x, goal.y)
        }
        other => anyhow::Error::new(other),
    })?;

    let successes = best.successes();
    let mut file = RrtFile {
        trajectory: None,
        report: None,
        sign_changes: None,
        seed: None,
        vertices: None,
        base_seed: args.seed,
        n: args.n,
        successes,
        failures: args.n - successes,
        runs: best.runs,
    };
    let mut stdout = std::io::stdout().lock();
    let outcome = match best.selected {
        Some(sel) => {
            let Motion { v, omega, dt } = args.motion;
            let trajectory = SegmentPath::from_polyline(&sel.path)?.to_timed(v, omega, dt)?;
            let report = eval_costs(&trajectory, &map, args.r);
            writeln!(
                stdout,
                "seed {}: {} sign changes, V={:.6} N={} D={:.6} ({successes}/{} runs succeeded)",
                sel.seed,
                sel.sign_changes,
                report.obstruction,
                report.turns,
                report.distance,
                args.n
            )?;
            file.trajectory = Some(trajectory);
            file.report = Some(report);
            file.sign_changes = Some(sel.sign_changes);
            file.seed = Some(sel.seed);
            file.vertices = Some(sel.path.vertices().to_vec());
            Outcome::Solved
        }
        None => {
            writeln!(
                stdout,
                "no path: all {} runs failed ({} failures)",
                args.n, file.failures
            )?;
            Outcome::NoSolution
        }
    };
    files::create_dir(&args.out)?;
    files::write_json(&args.out.join("rrt.json"), &file)?;
    Ok(outcome)
}

fn report_path(out: Option<&Path>, trajectory: &Path) -> PathBuf {
    let stem = trajectory
        .file_stem()
        .map_or_else(|| "trajectory".into(), |s| s.to_string_lossy().into_owned());
    let dir = out.map_or_else(
        || trajectory.parent().unwrap_or(Path::new("")).to_path_buf(),
        Path::to_path_buf,
    );
    dir.join(format!("{stem}.report.json"))
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        bail!("--r must be positive, got {r}");
    }
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<Outcome> {
    check_radius(args.r)?;
    let map = files::read_map(&args.map)?;
    let timed = args
        .trajectories
        .iter()
        .map(|p| files::read_trajectory(p))
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &args.out {
        files::create_dir(dir)?;
    }
    let mut stdout = std::io::stdout().lock();
    for (path, t) in args.trajectories.iter().zip(&timed) {
        let report = eval_costs(t, &map, args.r);
        let text = serde_json::to_string_pretty(&report)?;
        writeln!(stdout, "{}: {text}", path.display())?;
        let target = report_path(args.out.as_deref(), path);
        files::write_json(&target, &report)
            .with_context(|| format!("report for {}", path.display()))?;
    }
    Ok(Outcome::Solved)
}

pub fn render(args: &RenderArgs) -> Result<Outcome> {
    check_radius(args.r)?;
    let map = files::read_map(&args.map)?;
    let mut layers = Vec::new();
    for path in &args.trajectories {
        let t = files::read_trajectory(path)?;
        let label = path
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        let report = eval_costs(&t, &map, args.r);
        layers.push(layer(label, &t, report));
    }
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        files::create_dir(parent)?;
    }
    files::write_text(&args.out, &svg::render(&map, &layers))?;
    Ok(Outcome::Solved)
}
