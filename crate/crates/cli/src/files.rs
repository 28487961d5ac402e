use anyhow::{bail, Context, Result};
use pnav_core::rrt::RunSummary;
use pnav_core::trajectory::Segment;
use pnav_core::{
    CostReport, CostVector, GoalSpec, LatticeNode, Point2, TimedTrajectory, WorkspaceMap,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// A position with an optional heading in degrees, as given on the command
/// line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Point2,
    pub heading_deg: Option<f64>,
}

pub fn parse_pose(s: &str) -> Result<Pose, String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<f64>, String>>()?;
    if parts.iter().any(|v| !v.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    match parts[..] {
        [x, y] => Ok(Pose {
            position: Point2::new(x, y),
            heading_deg: None,
        }),
        [x, y, th] => Ok(Pose {
            position: Point2::new(x, y),
            heading_deg: Some(th),
        }),
        _ => Err(format!("expected X,Y or X,Y,TH, got `{s}`")),
    }
}

pub fn read_map(path: &Path) -> Result<WorkspaceMap> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read map {}", path.display()))?;
    WorkspaceMap::from_json(&text).with_context(|| format!("invalid map {}", path.display()))
}

/// Reads any JSON file holding the timed-trajectory fields. Other fields
/// are ignored.
pub fn read_trajectory(path: &Path) -> Result<TimedTrajectory> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read trajectory {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let timed: TimedTrajectory = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        if field == "." {
            // missing fields are named by the inner error
            anyhow::anyhow!("{}: {}", path.display(), e.inner())
        } else {
            anyhow::anyhow!("{}: field `{field}`: {}", path.display(), e.inner())
        }
    })?;
    timed
        .validate()
        .with_context(|| format!("invalid trajectory {}", path.display()))?;
    Ok(timed)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn create_dir(path: &Path) -> Result<()> {
    if path.exists() && !path.is_dir() {
        bail!(
            "output path {} exists and is not a directory",
            path.display()
        );
    }
    fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PlanSettings {
    pub delta: f64,
    pub rho: f64,
    pub r: f64,
    pub v: f64,
    pub omega_deg: f64,
    pub dt: f64,
}

/// Contents of `front.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FrontFile {
    pub start: LatticeNode,
    pub goal: GoalSpec,
    pub settings: PlanSettings,
    pub entries: Vec<FrontRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FrontRecord {
    pub report: CostReport,
    pub cost: CostVector,
    pub nodes: Vec<LatticeNode>,
    pub segments: Vec<Segment>,
    pub trajectory: TimedTrajectory,
}

/// A trajectory file with its evaluated cost.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrajectoryFile {
    #[serde(flatten)]
    pub trajectory: TimedTrajectory,
    pub report: CostReport,
}

/// Contents of `rrt.json`. The trajectory fields are absent when every run
/// failed.
#[derive(Debug, Serialize, Deserialize)]
pub struct RrtFile {
    #[serde(flatten)]
    pub trajectory: Option<TimedTrajectory>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CostReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_changes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Point2>>,
    pub base_seed: u64,
    pub n: usize,
    pub successes: usize,
    pub failures: usize,
    pub runs: Vec<RunSummary>,
}
