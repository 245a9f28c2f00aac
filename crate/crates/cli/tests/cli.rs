use std::path::Path;
use std::process::{Command, Output};

use hvp_core::io;
use hvp_core::triaxial::LoadProgram;
use hvp_core::MaterialParams;
use tempfile::TempDir;

fn hvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvp"))
        .args(args)
        .output()
        .expect("spawn hvp")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn inputs(dir: &TempDir) -> (std::path::PathBuf, std::path::PathBuf) {
    let params = dir.path().join("peat.toml");
    let program = dir.path().join("cycle.toml");
    io::write_params(&params, &MaterialParams::fitted_peat()).unwrap();
    io::write_program(&program, &LoadProgram::cycle(16.0, 5.0)).unwrap();
    (params, program)
}

#[test]
fn simulate_then_compare_with_itself() {
    let dir = TempDir::new().unwrap();
    let (params, program) = inputs(&dir);
    let out = dir.path().join("rec.csv");
    let o = hvp(&[
        "simulate",
        "--params",
        s(&params),
        "--program",
        s(&program),
        "--flow-rule",
        "gated",
        "--detach",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = io::read_record(&out).unwrap();
    assert!(rec.peak_q() > 0.0);
    assert!(rec.rows.iter().any(|r| r.mode.as_str() == "free"));

    let exp = dir.path().join("exp.csv");
    io::write_experiment(
        &exp,
        &io::synthetic_curve(&rec, 200, 0.0, 1, "16 %/h").unwrap(),
    )
    .unwrap();
    let o = hvp(&[
        "compare",
        "--sim",
        s(&out),
        "--exp",
        s(&exp),
        "--by",
        "time",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("rms 0.000000"), "{text}");
}

#[test]
fn invalid_parameter_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let (params, program) = inputs(&dir);
    let text = std::fs::read_to_string(&params)
        .unwrap()
        .replace("cp = 0.1", "cp = -0.1");
    std::fs::write(&params, text).unwrap();
    let out = dir.path().join("rec.csv");
    let o = hvp(&[
        "simulate",
        "--params",
        s(&params),
        "--program",
        s(&program),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("plastic.cp"));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(hvp(&["simulate", "--bogus"]).status.code(), Some(1));
    assert_eq!(hvp(&["verify", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(hvp(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_prints_one_line_per_value() {
    let dir = TempDir::new().unwrap();
    let (params, program) = inputs(&dir);
    let out_dir = dir.path().join("runs");
    let o = hvp(&[
        "sweep",
        "--axis",
        "c1",
        "--values",
        "4,9,14",
        "--params",
        s(&params),
        "--program",
        s(&program),
        "--out-dir",
        s(&out_dir),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "c1,peak_q_kpa,irrecoverable_strain_pct");
    assert_eq!(lines.len(), 4);
    let peaks: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2]);
    assert_eq!(std::fs::read_dir(&out_dir).unwrap().count(), 3);
    assert_eq!(
        hvp(&["sweep", "--axis", "c7", "--values", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn compare_without_overlap_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let (params, program) = inputs(&dir);
    let out = dir.path().join("rec.csv");
    assert!(hvp(&[
        "simulate",
        "--params",
        s(&params),
        "--program",
        s(&program),
        "--out",
        s(&out)
    ])
    .status
    .success());
    let exp = dir.path().join("late.csv");
    std::fs::write(&exp, "t_h,axial_strain_pct,q_kpa\n1000,0,0\n1001,0,0\n").unwrap();
    let o = hvp(&["compare", "--sim", s(&out), "--exp", s(&exp)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_dissipation_suite_passes() {
    let o = hvp(&["verify", "--suite", "dissipation"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}
