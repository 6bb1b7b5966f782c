use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermopiezo"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args).arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn only_subdir(dir: &Path) -> PathBuf {
    let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    entries.pop().unwrap()
}

const SHORT: &str = "[discretization]\nm = 4\nt_final = 0.05\noutput_stride = 5\nsnapshot_stride = 20\n";

#[test]
fn defaults_parse_back() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().arg("--print-defaults").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[discretization]") && text.contains("preset = \"smooth\""));
    let cfg = write(tmp.path(), "d.toml", &text);
    let out = run(&["check-density"], &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn zero_time_step_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[discretization]\ndt = 0.0\n");
    let out = run(&["run"], &cfg, &tmp.path().join("runs"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("discretization.dt"));
}

#[test]
fn negative_permittivity_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[material]\nkappa = -1.0\nrho = -2.0\n");
    let out = run(&["run"], &cfg, &tmp.path().join("runs"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("material.kappa") && err.contains("material.rho"), "{err}");
}

#[test]
fn unknown_preset_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[initial]\npreset = \"wobble\"\n");
    let out = run(&["run"], &cfg, &tmp.path().join("runs"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial"));
}

#[test]
fn check_density_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let zero = write(tmp.path(), "z.toml", "[density]\nkind = \"zero\"\n");
    assert_eq!(run(&["check-density"], &zero, tmp.path()).status.code(), Some(0));

    let cv = write(tmp.path(), "cv.toml", "[material]\ncaloric = \"constant-cv\"\n");
    let out = run(&["check-density"], &cv, tmp.path());
    assert_eq!(out.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&String> =
        report["items"].as_object().unwrap().iter().filter(|(_, v)| v["pass"] == false).map(|(k, _)| k).collect();
    assert_eq!(failed, vec!["2.1(iii)"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", SHORT);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run(&["run", "--seed", "7"], &cfg, &a).status.success());
    assert!(run(&["run", "--seed", "7"], &cfg, &b).status.success());
    let (da, db) = (only_subdir(&a), only_subdir(&b));
    for f in ["trace.csv", "summary.json", "checkpoint.json", "config.toml", "snapshots/0000.csv", "snapshots/0002.csv"] {
        assert_eq!(fs::read(da.join(f)).unwrap(), fs::read(db.join(f)).unwrap(), "{f}");
    }
    let trace = fs::read_to_string(da.join("trace.csv")).unwrap();
    assert!(trace.starts_with(
        "t,E_total,E_kin,E_elastic,E_couple,E_hyst,E_feedback,E_electro,E_caloric,E_entropy_coupling,diss_rate,min_theta,D_resid,q_resid\n"
    ));
    assert_eq!(trace.lines().count(), 1 + 11);
    let snap = fs::read_to_string(da.join("snapshots/0001.csv")).unwrap();
    assert!(snap.starts_with("x,u,u_x,theta,q,P,sigma,E_field\n"));
}

#[test]
fn elastic_run_dissipates_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "e.toml",
        "[material]\nnu = 0.0\nbeta = 0.0\n[density]\nkind = \"zero\"\n[initial]\npreset = \"mode\"\nk = 1\namplitude = 0.1\n[discretization]\nm = 4\nt_final = 0.1\n",
    );
    let runs = tmp.path().join("runs");
    let out = run(&["run"], &cfg, &runs);
    assert!(out.status.success());
    let dir = only_subdir(&runs);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "completed");
    assert_eq!(summary["summary"]["max_dissipation_rate"], 0.0);
    let mut rdr = csv::Reader::from_path(dir.join("trace.csv")).unwrap();
    for rec in rdr.records() {
        assert_eq!(&rec.unwrap()[10], "0.0");
    }
}

#[test]
fn full_run_keeps_temperature_positive() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", SHORT);
    let runs = tmp.path().join("runs");
    assert!(run(&["run"], &cfg, &runs).status.success());
    let dir = only_subdir(&runs);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary["summary"]["min_theta"].as_f64().unwrap() >= -1e-10);
    assert!(summary["summary"]["max_q_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn rejected_run_still_writes_a_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", &format!("[material]\ncaloric = \"constant-cv\"\n{SHORT}"));
    let runs = tmp.path().join("runs");
    let out = run(&["run"], &cfg, &runs);
    assert_eq!(out.status.code(), Some(4));
    let dir = only_subdir(&runs);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "rejected");
    assert_eq!(summary["exit_code"], 4);
    assert_eq!(summary["failed_items"][0], "2.1(iii)");
}

#[test]
fn converge_reports_shrinking_distances() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", "[discretization]\nt_final = 0.1\n");
    let runs = tmp.path().join("runs");
    let out = run(&["converge", "--modes", "4,8,16"], &cfg, &runs);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = only_subdir(&runs);
    let mut rdr = csv::Reader::from_path(dir.join("converge.csv")).unwrap();
    let d: Vec<f64> = rdr.records().filter_map(|r| r.unwrap()[6].parse().ok()).collect();
    assert_eq!(d.len(), 2);
    assert!(d[1] < d[0]);

    let out = run(&["converge", "--modes", "8,4"], &cfg, tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn loops_for_uniform_and_zero_densities() {
    let tmp = tempfile::tempdir().unwrap();
    let uni = write(tmp.path(), "u.toml", "[density]\nkind = \"uniform-test\"\n");
    let out_u = tmp.path().join("u");
    let out = run(&["loops", "--amplitude", "2", "--cycles", "1", "--samples", "400"], &uni, &out_u);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(only_subdir(&out_u).join("loop_balance.csv")).unwrap();
    for rec in rdr.records() {
        let gap: f64 = rec.unwrap()[4].parse().unwrap();
        assert!(gap < 1e-3);
    }

    let zero = write(tmp.path(), "z.toml", "[density]\nkind = \"zero\"\n");
    let out_z = tmp.path().join("z");
    assert!(run(&["loops"], &zero, &out_z).status.success());
    let mut rdr = csv::Reader::from_path(only_subdir(&out_z).join("loop_q.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["theta", "q", "P", "U", "dissipation"]);
    for rec in rdr.records() {
        assert_eq!(rec.unwrap()[2].parse::<f64>().unwrap(), 0.0);
    }

    let out = run(&["loops", "--samples", "6"], &zero, &out_z);
    assert_eq!(out.status.code(), Some(2));
}
