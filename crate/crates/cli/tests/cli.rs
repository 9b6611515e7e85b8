use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn vbstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vbstab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const FOUR_LINES: &str = r#"{"atoms": [
  {"rank": 1, "degree": 2, "label": "O(2)"},
  {"rank": 1, "degree": 0, "label": "O"},
  {"rank": 1, "degree": 0, "label": "O"},
  {"rank": 1, "degree": -1, "label": "O(-1)"}
]}"#;

#[test]
fn analyze_writes_tables_and_polygon() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "b.json", FOUR_LINES);
    let out = dir.path().join("out");
    let o = vbstab(&["analyze", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(out.join("shatz.csv")).unwrap(),
        "x,y\n0,0\n1,2\n3,2\n4,1\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("hn.csv")).unwrap(),
        "step,rank,degree,mu_num,mu_den\n1,1,2,2,1\n2,2,0,0,1\n3,1,-1,-1,1\n"
    );
    let svg = fs::read_to_string(out.join("shatz.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    assert!(stdout(&o).contains("verdict: unstable"));
    assert!(fs::read_to_string(out.join("summary.txt"))
        .unwrap()
        .contains("hn_type: [2, 0, 0, -1]"));
}

#[test]
fn analyze_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "b.json", FOUR_LINES);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(
            code(&vbstab(&["analyze", &spec, "--out", d.to_str().unwrap()])),
            0
        );
    }
    for f in ["hn.csv", "shatz.csv", "shatz.svg", "summary.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
}

#[test]
fn analyze_single_atom_is_stable() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        dir.path(),
        "b.json",
        r#"{"atoms":[{"rank":2,"degree":3,"label":"E"}]}"#,
    );
    let o = vbstab(&["analyze", &spec, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: stable"));
    assert_eq!(
        fs::read_to_string(dir.path().join("shatz.csv")).unwrap(),
        "x,y\n0,0\n2,3\n"
    );
    assert_eq!(
        fs::read_to_string(dir.path().join("hn.csv")).unwrap(),
        "step,rank,degree,mu_num,mu_den\n1,2,3,3,2\n"
    );
}

#[test]
fn analyze_rejects_malformed_specs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let rank0 = write(
        dir.path(),
        "r0.json",
        r#"{"atoms":[{"rank":1,"degree":0,"label":"O"},{"rank":0,"degree":1,"label":"bad"}]}"#,
    );
    let o = vbstab(&["analyze", &rank0, "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("record 2") && stderr(&o).contains("bad"));

    let syntax = write(
        dir.path(),
        "s.json",
        "{\"atoms\": [\n  {\"rank\": 1 \"degree\": 0}\n]}",
    );
    let o = vbstab(&["analyze", &syntax, "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2, column"), "{}", stderr(&o));

    let empty = write(dir.path(), "e.json", r#"{"atoms":[]}"#);
    assert_eq!(code(&vbstab(&["analyze", &empty, "--out", out])), 2);
    assert_eq!(
        code(&vbstab(&["analyze", "/nonexistent/x.json", "--out", out])),
        2
    );
}

#[test]
fn flow_converges_for_degree_one_line_bundle() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "f.cfg",
        "grid_n = 16\nrank = 1\ndegree = 1\nseed = 3\n",
    );
    let o = vbstab(&["flow", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("central_residual:"))
        .unwrap()
        .to_string();
    let residual: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(residual <= 1e-6);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,energy,grad_norm,central_residual\n"));
    assert!(fs::read_to_string(dir.path().join("final_connection.txt"))
        .unwrap()
        .starts_with("vbstab-connection 1\n16 1 1\n"));
}

#[test]
fn flow_prints_jacobian_coordinates_for_flat_line_bundles() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "f.cfg", "grid_n = 8\nrank = 1\ndegree = 0\n");
    let o = vbstab(&["flow", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("jacobian_coordinates: 0."));
}

#[test]
fn flow_budget_exhaustion_exits_3_with_one_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "f.cfg",
        "grid_n = 16\nrank = 2\ndegree = 0\nmax_steps = 1\n",
    );
    let o = vbstab(&["flow", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn flow_trace_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "f.cfg",
        "grid_n = 8\nrank = 2\ndegree = 1\nmax_steps = 40\nrecord_every = 5\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        vbstab(&["flow", &cfg, "--seed", "9", "--out", d.to_str().unwrap()]);
    }
    assert_eq!(
        fs::read(a.join("trace.csv")).unwrap(),
        fs::read(b.join("trace.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("final_connection.txt")).unwrap(),
        fs::read(b.join("final_connection.txt")).unwrap()
    );
}

#[test]
fn flow_rejects_bad_configs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad_grid = write(dir.path(), "a.cfg", "grid_n = 10\nrank = 1\ndegree = 0\n");
    assert_eq!(code(&vbstab(&["flow", &bad_grid, "--out", out])), 2);
    let unknown = write(
        dir.path(),
        "b.cfg",
        "grid_n = 16\nrank = 1\ndegree = 0\nspeed = 3\n",
    );
    let o = vbstab(&["flow", &unknown, "--out", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("speed"));
}

#[test]
fn verify_suites() {
    let o = vbstab(&["verify", "momentum"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS momentum_residual"));
    let o = vbstab(&["verify", "reduction", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("reduced_area(c=1)"));
    assert_eq!(code(&vbstab(&["verify", "nonsense"])), 2);
}

#[test]
fn verify_algebra_reports_zero_mismatches() {
    let o = vbstab(&["verify", "algebra"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("PASS filtration_oracle_mismatches: 0e0"));
}

fn loop_file(dir: &Path, f: impl Fn(f64) -> (f64, f64), n: usize) -> String {
    let text: String = (0..n)
        .map(|k| {
            let (re, im) = f(2.0 * PI * k as f64 / n as f64);
            format!("{re:?} {im:?}\n")
        })
        .collect();
    write(dir, "loop.txt", &text)
}

#[test]
fn clutch_reports_degrees() {
    let dir = TempDir::new().unwrap();
    let p = loop_file(dir.path(), |t| ((3.0 * t).cos(), (3.0 * t).sin()), 64);
    let o = vbstab(&["clutch", &p]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "3");
    let p = loop_file(dir.path(), |_| (2.0, -1.0), 16);
    assert_eq!(stdout(&vbstab(&["clutch", &p])).trim(), "0");
}

#[test]
fn clutch_rejects_zero_and_undersampled_loops() {
    let dir = TempDir::new().unwrap();
    let p = write(
        dir.path(),
        "z.txt",
        "1 0\n0 1\n-1 0\n0 -1\n0 0\n1 0\n0 1\n-1 0\n",
    );
    let o = vbstab(&["clutch", &p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sample 4"));
    let p = loop_file(dir.path(), |t| ((4.0 * t).cos(), (4.0 * t).sin()), 8);
    let o = vbstab(&["clutch", &p]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("under-sampled"));
    let p = write(dir.path(), "bad.txt", "1 0\nfoo\n");
    assert_eq!(code(&vbstab(&["clutch", &p])), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&vbstab(&[])), 2);
    assert_eq!(code(&vbstab(&["frobnicate"])), 2);
}
