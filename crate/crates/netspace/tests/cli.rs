use std::path::Path;
use std::process::{Command, Output};

use netspace::{load_grid_csv, make_indicator_2d, save_grid_csv};
use tempfile::tempdir;

const BIN: &str = env!("CARGO_BIN_EXE_netspace");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn netspace")
}

fn write_indicator(dir: &Path) -> std::path::PathBuf {
    let grid = make_indicator_2d(1.0, 1.0, 8, 8).unwrap();
    let path = dir.join("ind.csv");
    save_grid_csv(&path, &grid, &[]).unwrap();
    path
}

#[test]
fn avg_writes_matrix_with_provenance() {
    let dir = tempdir().unwrap();
    let input = write_indicator(dir.path());
    let out = dir.path().join("avg.csv");
    let o = run(&[
        "avg",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--points-per-octave",
        "2",
    ]);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# netspace v"), "missing provenance: {text}");
    assert!(text.lines().count() > 3);
}

#[test]
fn norm_prints_breakdown() {
    let dir = tempdir().unwrap();
    let input = write_indicator(dir.path());
    let o = run(&["norm", input.to_str().unwrap(), "--p", "2,2", "--q", "1,1"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    let norm: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("norm"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!((norm - 16.0).abs() / 16.0 < 0.02, "norm {norm} far from 16");
    assert!(stdout.contains("head") && stdout.contains("tail"));
}

#[test]
fn norm_rejects_bad_exponent() {
    let dir = tempdir().unwrap();
    let input = write_indicator(dir.path());
    let o = run(&["norm", input.to_str().unwrap(), "--p", "0.5,2", "--q", "1,1"]);
    assert_eq!(o.status.code(), Some(2), "bad p should exit 2");
}

#[test]
fn decompose_writes_four_components() {
    let dir = tempdir().unwrap();
    let input = write_indicator(dir.path());
    let prefix = dir.path().join("part");
    let o = run(&[
        "decompose",
        input.to_str().unwrap(),
        "--tau",
        "2,2",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for suffix in ["00", "01", "10", "11"] {
        let p = dir.path().join(format!("part_{suffix}.csv"));
        let g = load_grid_csv(&p).unwrap();
        assert_eq!(g.dims(), (8, 8));
    }
}

#[test]
fn kfunc_reports_finite_ratio() {
    let dir = tempdir().unwrap();
    let input = write_indicator(dir.path());
    let o = run(&[
        "kfunc",
        input.to_str().unwrap(),
        "--p0",
        "2,2",
        "--p1",
        "4,4",
        "--theta",
        "0.5,0.5",
        "--q",
        "1,1",
    ]);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let ratio: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("ratio"))
        .and_then(|l| l.split_whitespace().last())
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio.is_finite() && ratio > 0.0, "ratio {ratio}");
}

#[test]
fn parse_error_reports_line_and_exits_3() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "# origin=0,0 cells=1,1 dims=2,2\n1,2\n3,oops\n").unwrap();
    let o = run(&["norm", path.to_str().unwrap(), "--p", "2,2", "--q", "1,1"]);
    assert_eq!(o.status.code(), Some(3));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
}

#[test]
fn missing_input_exits_3() {
    let o = run(&["norm", "/nonexistent/grid.csv", "--p", "2,2", "--q", "1,1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_small_campaign_passes_and_writes_report() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&[
        "verify",
        "--seeds",
        "0..6",
        "--resolutions",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("est-f11/all"));
    assert!(text.contains("hardy-second"));
}

#[test]
fn verify_flags_override_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("campaign.cfg");
    std::fs::write(&cfg, "seeds=0..4\nresolutions=8\nt_per_regime=2\n").unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--resolutions",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("n=16"), "flag should override file: {text}");
    assert!(!text.contains("n=8 "), "file resolution should be ignored: {text}");
}

#[test]
fn verify_rejects_unknown_config_key() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("campaign.cfg");
    std::fs::write(&cfg, "seeds=0..4\nbogus=1\n").unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
