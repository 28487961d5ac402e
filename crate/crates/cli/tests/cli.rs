use pnav_core::fixtures::MUSEUM_MAP_JSON;
use pnav_core::{Point2, WorkspaceMap};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        std::fs::write(ws.path("museum.json"), MUSEUM_MAP_JSON).unwrap();
        let free = WorkspaceMap::new(3, 3, 1.0, Point2::default(), vec![false; 9]).unwrap();
        std::fs::write(ws.path("free.json"), free.to_json()).unwrap();
        let open = WorkspaceMap::new(20, 20, 0.5, Point2::default(), vec![false; 400]).unwrap();
        std::fs::write(ws.path("open.json"), open.to_json()).unwrap();
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

fn pnav(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnav"))
        .args(args)
        .env_clear()
        .envs(env.iter().copied())
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn free_three_by_three_front() {
    let ws = Workspace::new();
    let (map, out) = (ws.arg("free.json"), ws.arg("out"));
    let args = [
        "plan",
        "--map",
        &map,
        "--start",
        "0.5,0.5,0",
        "--goal",
        "2.5,2.5",
        "--delta",
        "1",
        "--rho",
        "0.3",
        "--r",
        "0.4",
        "--out",
        &out,
    ];
    let run = pnav(&args, &[]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let front = json(&ws.path("out/front.json"));
    let entries = front["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    let report = &entries[0]["report"];
    assert_eq!(report["N"], 1);
    assert!((report["D"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() <= 1e-9);
    assert_eq!(entries[0]["nodes"].as_array().unwrap().len(), 4);
    assert!(!ws.path("out/front.svg").exists());
}

#[test]
fn environment_fills_in_and_flags_win() {
    let ws = Workspace::new();
    let map = ws.arg("free.json");
    let env = [
        ("PNAV_MAP", map.as_str()),
        ("PNAV_START", "0.5,0.5,0"),
        ("PNAV_GOAL", "2.5,2.5"),
        ("PNAV_DELTA", "1"),
        ("PNAV_RHO", "0.3"),
        ("PNAV_R", "0.4"),
        ("PNAV_V", "2"),
        ("PNAV_OUT", ""),
    ];
    let out = ws.arg("env");
    let run = pnav(&["plan", "--out", &out], &env);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let front = json(&ws.path("env/front.json"));
    assert_eq!(front["settings"]["v"], 2.0);
    assert_eq!(front["settings"]["delta"], 1.0);

    let run = pnav(&["plan", "--out", &out, "--v", "0.5"], &env);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(json(&ws.path("env/front.json"))["settings"]["v"], 0.5);

    // the default lattice step is twice the map resolution
    let run = pnav(
        &[
            "plan",
            "--out",
            &out,
            "--start",
            "0.5,0.5,0",
            "--goal",
            "2.5,2.5",
        ],
        &[("PNAV_MAP", &map)],
    );
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(json(&ws.path("env/front.json"))["settings"]["delta"], 2.0);
}

#[test]
fn front_entries_round_trip_through_eval() {
    let ws = Workspace::new();
    let (map, out) = (ws.arg("museum.json"), ws.arg("out"));
    let args = [
        "plan",
        "--map",
        &map,
        "--start",
        "2.25,3.25,0",
        "--goal",
        "17.25,3.25",
        "--out",
        &out,
        "--svg",
    ];
    assert_eq!(pnav(&args, &[]).status.code(), Some(0));
    let front = json(&ws.path("out/front.json"));
    let entries = front["entries"].as_array().unwrap();
    let distances: Vec<f64> = entries
        .iter()
        .map(|e| e["report"]["D"].as_f64().unwrap())
        .collect();
    assert!(distances.windows(2).all(|w| w[0] <= w[1]));
    for i in [0, entries.len() - 1] {
        let file = ws.path(&format!("out/entry_{i:02}.json"));
        let reports = ws.arg("reports");
        let run = pnav(
            &[
                "eval",
                "--map",
                &map,
                "--r",
                "2",
                file.to_str().unwrap(),
                "--out",
                &reports,
            ],
            &[],
        );
        assert_eq!(run.status.code(), Some(0));
        let evaluated = json(&ws.path(&format!("reports/entry_{i:02}.report.json")));
        let stored = &entries[i]["report"];
        for key in ["V", "D", "T"] {
            let (a, b) = (
                evaluated[key].as_f64().unwrap(),
                stored[key].as_f64().unwrap(),
            );
            assert!((a - b).abs() <= 1e-9, "{key}: {a} vs {b}");
        }
        assert_eq!(evaluated["N"], stored["N"]);
        assert!(stored["obstruction_sum"].is_number());
    }
    let overlay = std::fs::read_to_string(ws.path("out/front.svg")).unwrap();
    assert_eq!(overlay.matches("<polyline").count(), entries.len());
    assert_eq!(overlay.matches("class=\"legend\"").count(), entries.len());
    let single = std::fs::read_to_string(ws.path("out/entry_00.svg")).unwrap();
    assert_eq!(single.matches("<polyline").count(), 1);
}

#[test]
fn sealed_goal_writes_an_empty_front() {
    let ws = Workspace::new();
    let rows = [
        ".......", ".#####.", ".#...#.", ".#...#.", ".#...#.", ".#####.", ".......",
    ];
    let sealed = WorkspaceMap::from_rows(&rows, 1.0, Point2::default()).unwrap();
    std::fs::write(ws.path("sealed.json"), sealed.to_json()).unwrap();
    let (map, out) = (ws.arg("sealed.json"), ws.arg("out"));
    let args = [
        "plan",
        "--map",
        &map,
        "--start",
        "0.5,0.5,0",
        "--goal",
        "3.5,3.5",
        "--delta",
        "1",
        "--out",
        &out,
        "--svg",
    ];
    assert_eq!(pnav(&args, &[]).status.code(), Some(2));
    assert_eq!(
        json(&ws.path("out/front.json"))["entries"],
        Value::Array(vec![])
    );
    assert!(ws.path("out/front.svg").exists());

    let out = ws.arg("rrt");
    let args = [
        "rrt",
        "--map",
        &map,
        "--start",
        "0.5,0.5",
        "--goal",
        "3.5,3.5",
        "--n",
        "4",
        "--max-iterations",
        "300",
        "--out",
        &out,
    ];
    let run = pnav(&args, &[]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stdout).contains("all 4 runs failed"));
    let summary = json(&ws.path("rrt/rrt.json"));
    assert_eq!(
        (summary["successes"].as_u64(), summary["failures"].as_u64()),
        (Some(0), Some(4))
    );
    assert_eq!(summary["runs"].as_array().unwrap().len(), 4);
    assert!(summary.get("samples").is_none());
}

#[test]
fn rrt_output_evaluates_to_its_direction_changes() {
    let ws = Workspace::new();
    let (map, out) = (ws.arg("museum.json"), ws.arg("rrt"));
    let args = [
        "rrt",
        "--map",
        &map,
        "--start",
        "2.25,3.25",
        "--goal",
        "17.25,3.25",
        "--n",
        "25",
        "--seed",
        "9",
        "--out",
        &out,
    ];
    assert_eq!(pnav(&args, &[]).status.code(), Some(0));
    let file = ws.path("rrt/rrt.json");
    let stored = json(&file);
    let vertices: Vec<(f64, f64)> = stored["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["x"].as_f64().unwrap(), p["y"].as_f64().unwrap()))
        .collect();
    let changes = vertices
        .windows(3)
        .filter(|w| {
            let (a, b) = (
                (w[1].0 - w[0].0, w[1].1 - w[0].1),
                (w[2].0 - w[1].0, w[2].1 - w[1].1),
            );
            let cross = (a.0 * b.1 - a.1 * b.0) / (a.0.hypot(a.1) * b.0.hypot(b.1));
            cross.abs() > 1e-9 || a.0 * b.0 + a.1 * b.1 < 0.0
        })
        .count();
    let run = pnav(&["eval", "--map", &map, file.to_str().unwrap()], &[]);
    assert_eq!(run.status.code(), Some(0));
    let report = json(&ws.path("rrt/rrt.report.json"));
    assert_eq!(report["N"].as_u64(), Some(changes as u64));
    assert_eq!(report["N"], stored["report"]["N"]);
    let length: f64 = vertices
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .sum();
    assert!((report["D"].as_f64().unwrap() - length).abs() <= 1e-9);
}

#[test]
fn single_rrt_run_on_an_open_map() {
    let ws = Workspace::new();
    let (map, out) = (ws.arg("open.json"), ws.arg("rrt"));
    let args = [
        "rrt", "--map", &map, "--start", "1,1", "--goal", "9,9", "--n", "1", "--seed", "3",
        "--out", &out,
    ];
    assert_eq!(pnav(&args, &[]).status.code(), Some(0));
    let stored = json(&ws.path("rrt/rrt.json"));
    assert_eq!(stored["seed"], 3);
    let d = stored["report"]["D"].as_f64().unwrap();
    assert!(d >= 8.0 * 2f64.sqrt() - 1e-9 && d < 1.5 * 8.0 * 2f64.sqrt());
}

#[test]
fn hand_written_trajectory() {
    let ws = Workspace::new();
    let samples: Vec<String> = (0..=8)
        .map(|k| {
            format!(
                r#"{{"t": {}, "x": {}, "y": 5, "theta_deg": 0}}"#,
                k as f64 * 0.5,
                3.0 + k as f64 * 0.5
            )
        })
        .collect();
    let text = format!(
        r#"{{"v": 1, "omega_deg": 90, "dt": 0.5, "samples": [{}]}}"#,
        samples.join(",")
    );
    std::fs::write(ws.path("line.json"), text).unwrap();
    let (map, line) = (ws.arg("open.json"), ws.arg("line.json"));
    let run = pnav(&["eval", "--map", &map, "--r", "1", &line], &[]);
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stdout).contains("\"N\": 0"));
    let report = json(&ws.path("line.report.json"));
    assert_eq!(report["N"], 0);
    assert!((report["D"].as_f64().unwrap() - 4.0).abs() <= 1e-9);
    assert_eq!(report["V"], 0.0);

    let svg = ws.arg("line.svg");
    assert_eq!(
        pnav(&["render", "--map", &map, "--out", &svg, &line], &[])
            .status
            .code(),
        Some(0)
    );
    let svg = std::fs::read_to_string(ws.path("line.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert_eq!(svg.matches("<circle").count(), 0);
}

#[test]
fn malformed_inputs_name_the_problem() {
    let ws = Workspace::new();
    let map = ws.arg("open.json");
    let cases = [
        (r#"{"v": 1, "omega_deg": 90, "samples": []}"#, "dt"),
        (
            r#"{"v": 1, "omega_deg": 90, "dt": "fast", "samples": []}"#,
            "dt",
        ),
        (
            r#"{"v": 1, "omega_deg": 90, "dt": 0.1, "samples": []}"#,
            "samples",
        ),
        (
            r#"{"v": -1, "omega_deg": 90, "dt": 0.1, "samples": [{"t": 0, "x": 1, "y": 1, "theta_deg": 0}]}"#,
            "v",
        ),
        (
            r#"{"v": 1, "omega_deg": 90, "dt": 0.1, "samples": [{"t": 0, "x": 1, "theta_deg": 0}]}"#,
            "y",
        ),
        ("[1, 2", "line"),
    ];
    for (text, field) in cases {
        std::fs::write(ws.path("bad.json"), text).unwrap();
        let bad = ws.arg("bad.json");
        for args in [
            vec!["eval", "--map", &map, &bad],
            vec!["render", "--map", &map, "--out", "x.svg", &bad],
        ] {
            let run = pnav(&args, &[]);
            let stderr = String::from_utf8_lossy(&run.stderr);
            assert_eq!(run.status.code(), Some(1), "{text}");
            assert!(stderr.contains(field), "{text}: {stderr}");
            assert!(!stderr.contains("panicked"));
        }
    }
    std::fs::write(
        ws.path("map.json"),
        r#"{"width": 2, "height": 1, "resolution": 1, "origin": [0, 0], "rows": ["."]}"#,
    )
    .unwrap();
    let run = pnav(
        &[
            "plan",
            "--map",
            &ws.arg("map.json"),
            "--start",
            "0.5,0.5,0",
            "--goal",
            "1,0.5",
        ],
        &[],
    );
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("width 2"));
    let run = pnav(
        &[
            "plan", "--map", &map, "--start", "0.5,0.5", "--goal", "1,0.5",
        ],
        &[],
    );
    assert!(String::from_utf8_lossy(&run.stderr).contains("invalid start"));
    let run = pnav(
        &[
            "plan",
            "--map",
            &map,
            "--start",
            "0.5,0.5,0",
            "--goal",
            "99,0.5",
        ],
        &[],
    );
    assert!(String::from_utf8_lossy(&run.stderr).contains("invalid goal"));
    assert_eq!(pnav(&["--help"], &[]).status.code(), Some(0));
}
