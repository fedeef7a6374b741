use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hausdorff-lab"))
        .args(args)
        .env_remove("HAUSDORFF_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn condition_exit_codes() {
    assert_eq!(lab(&["check-condition", "zero"]).status.code(), Some(0));
    assert_eq!(lab(&["check-condition", "divergent"]).status.code(), Some(2));
    assert_eq!(lab(&["check-condition", "1*r^-0.5@[1,inf]"]).status.code(), Some(3));

    let out = lab(&["check-condition", "annulus", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // 2 * 0.5 * 2 * \int_1^2 r^{1/2} dr = (4/3)(2 sqrt 2 - 1).
    let want = 4.0 / 3.0 * (2.0 * 2f64.sqrt() - 1.0);
    assert!((v["sharp_value"].as_f64().unwrap() - want).abs() < 1e-12 * want);
    let zero: serde_json::Value = serde_json::from_slice(&lab(&["check-condition", "zero", "--json"]).stdout).unwrap();
    assert_eq!(zero["sharp_value"].as_f64(), Some(0.0));
}

#[test]
fn malformed_kernels_report_where() {
    let out = lab(&["check-condition", "1*r^2@[0,1] 2*q^3@[1,2]"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 13"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k.json");
    std::fs::write(&file, "[{\"r_lo\": 1, \"r_hi\": 2,\n \"c\": }]").unwrap();
    let out = lab(&["check-condition", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn norms_from_the_command_line() {
    let read = |args: &[&str]| -> f64 {
        let o = lab(args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o).lines().next().unwrap().trim().parse().unwrap()
    };
    let m = read(&["norm", "gaussian"]);
    assert!((m - 0.5f64.sqrt()).abs() < 1e-6);
    let w = read(&["norm", "gaussian", "--space", "wiener"]);
    assert!((w - m).abs() < 1e-10);
    assert_eq!(read(&["norm", "zero", "--p", "1", "--q", "inf"]), 0.0);
    let l2 = read(&["norm", "gaussian", "--space", "lebesgue"]);
    assert!((l2 - 2f64.powf(-0.25)).abs() < 1e-12);
}

#[test]
fn spectral_tail_guard_exit() {
    // e^{-pi x^2} e^{10 pi i x} sits at frequency 5, beyond the lattice of
    // a 256-point grid on [-16, 16).
    let out = lab(&["norm", "modulated-gaussian-5", "--discrete", "--points", "256"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn apply_writes_a_grid_function() {
    let dir = tempfile::tempdir().unwrap();
    let header = dir.path().join("hf.json");
    let out = lab(&["apply", "annulus", "gaussian", "-o", header.to_str().unwrap(), "--points", "1024"]);
    assert_eq!(out.status.code(), Some(0));
    let f = hausdorff_lab::grid::io::read(&header).unwrap();
    // H g(0) = \int Phi = 1.
    assert!((f.values()[f.spec().center()].re - 1.0).abs() < 1e-12);

    let tilde = dir.path().join("thf.json");
    let out = lab(&["apply", "annulus", header.to_str().unwrap(), "--tilde", "-o", tilde.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(&tilde.with_extension("csv")).exists());
}

#[test]
fn corpus_listing_and_usage_errors() {
    let out = lab(&["corpus", "list"]);
    assert_eq!(stdout(&out).lines().count(), 20);
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lab(&["verify", "nonsense"]).status.code(), Some(1));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_identities_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hausdorff-lab"))
        .args(["verify", "identities", "--workers", "4"])
        .env("HAUSDORFF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    for name in ["report.json", "timings.json", "checks.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 7);
    assert!(report["passed"].as_bool().unwrap());
}

#[test]
fn invalid_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n[grid]\npoints = 100\n").unwrap();
    let out = lab(&["verify", "identities", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
