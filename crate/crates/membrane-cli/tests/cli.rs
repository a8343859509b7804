//! End-to-end tests of the batch driver: exit codes, file outputs, and the
//! bit-identical determinism contract.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_membrane"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("membrane_cli_tests").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const SOLVE_CFG: &str = "\
domain.shape = disk
domain.radius = 1
grid.n = 96
solver.alpha = 10
solver.area = 1.5707963267948966
solver.init = annulus
";

#[test]
fn solve_writes_artifacts_and_exits_zero() {
    let dir = tmp("solve_ok");
    let cfg = write_cfg(&dir, "run.cfg", SOLVE_CFG);
    let out = dir.join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for f in ["u.txt", "pair.txt", "history.csv", "manifest.json", "u.pgm", "d.pgm"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("config_hash"));
    assert!(manifest.contains("v- = max(-v,0)"), "manifest must record the sign convention");
}

#[test]
fn bad_area_exits_one_naming_the_key() {
    let dir = tmp("bad_area");
    let cfg = write_cfg(
        &dir,
        "run.cfg",
        "domain.shape = disk\ndomain.radius = 1\ngrid.n = 64\nsolver.alpha = 10\nsolver.area = 100\n",
    );
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("solver.area"), "stderr should name the key: {stderr}");
}

#[test]
fn unknown_key_exits_one() {
    let dir = tmp("unknown_key");
    let cfg = write_cfg(&dir, "run.cfg", "domain.shap = disk\n");
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain.shap"));
}

#[test]
fn non_convergence_exits_two_with_history() {
    let dir = tmp("nonconv");
    let cfg = write_cfg(
        &dir,
        "run.cfg",
        "domain.shape = ellipse\ndomain.a = 1\ndomain.b = 0.5\ngrid.n = 96\nsolver.alpha = 10\nsolver.area_frac = 0.5\nsolver.init = seeded\nsolver.seed = 9\nsolver.max_iter = 1\nsolver.tol = 1e-14\n",
    );
    let out_dir = dir.join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(out_dir.join("history.csv").exists(), "history must be written on failure");
}

#[test]
fn outputs_are_bit_identical_for_same_config_and_seed() {
    let dir = tmp("determinism");
    let cfg = write_cfg(
        &dir,
        "run.cfg",
        "domain.shape = disk\ndomain.radius = 1\ngrid.n = 72\nsolver.alpha = 10\nsolver.area_frac = 0.5\nsolver.init = seeded\n",
    );
    let (o1, o2) = (dir.join("o1"), dir.join("o2"));
    for out in [&o1, &o2] {
        let status = bin()
            .args(["solve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--seed", "42"])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for f in ["u.txt", "pair.txt", "history.csv", "manifest.json", "u.pgm", "d.pgm"] {
        let a = std::fs::read(o1.join(f)).unwrap();
        let b = std::fs::read(o2.join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
}

#[test]
fn exact_blank_found_and_not_found() {
    let dir = tmp("exact");
    let ok = write_cfg(
        &dir,
        "ok.cfg",
        "exact.kind = blank\nexact.f0 = 1\nexact.g0 = -16\nexact.n = 129\nexact.radii = 0.2,0.3,0.4\n",
    );
    let status = bin()
        .args(["exact", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(dir.join("ok_out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let params = std::fs::read_to_string(dir.join("ok_out").join("params.txt")).unwrap();
    assert!(params.contains("kind = blank") && params.contains("theta0"));

    let missing = write_cfg(
        &dir,
        "missing.cfg",
        "exact.kind = blank\nexact.f0 = 1\nexact.g0 = -13\nexact.n = 129\n",
    );
    let status = bin()
        .args(["exact", "--config"])
        .arg(&missing)
        .arg("--out")
        .arg(dir.join("missing_out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "non-existent profile is a numerical failure");
}

#[test]
fn sweep_curve_has_requested_rows() {
    let dir = tmp("sweep");
    let cfg = write_cfg(
        &dir,
        "run.cfg",
        "domain.shape = disk\ndomain.radius = 1\ngrid.n = 72\nsolver.alpha = 10\nsolver.area_list = 0.9,1.5,2.1\n",
    );
    let out = dir.join("out");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let curve = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 4, "header + 3 rows:\n{curve}");
    assert!(curve.starts_with("A,Lambda,c,iterations,flag_subcritical"));
    assert!(out.join("residuals.csv").exists());
    assert!(out.join("summary.txt").exists());
}

#[test]
fn diagnose_runs_all_five_checks_on_solve_output() {
    let dir = tmp("diagnose");
    let solve_cfg = write_cfg(
        &dir,
        "solve.cfg",
        "domain.shape = ellipse\ndomain.a = 1\ndomain.b = 0.5\ngrid.n = 96\nsolver.alpha = 10\nsolver.area_frac = 0.5\n",
    );
    let solve_out = dir.join("solve_out");
    assert_eq!(
        bin()
            .args(["solve", "--config"])
            .arg(&solve_cfg)
            .arg("--out")
            .arg(&solve_out)
            .status()
            .unwrap()
            .code(),
        Some(0)
    );
    let diag_cfg = write_cfg(
        &dir,
        "diag.cfg",
        &format!(
            "domain.shape = ellipse\ndomain.a = 1\ndomain.b = 0.5\ngrid.n = 96\nsolver.alpha = 10\nsolver.area_frac = 0.5\nsolver.seeds = 1,2,3\ndiag.input_dir = {}\n",
            solve_out.display()
        ),
    );
    let diag_out = dir.join("diag_out");
    let status = bin()
        .args(["diagnose", "--config"])
        .arg(&diag_cfg)
        .arg("--out")
        .arg(&diag_out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(diag_out.join("diagnostics.csv")).unwrap();
    for check in ["pohozaev", "weak_uniqueness", "levelset", "gradient_on_F", "symmetry"] {
        assert!(csv.contains(check), "missing check {check}:\n{csv}");
    }
}

#[test]
fn weiss_and_blowup_produce_their_csv() {
    let dir = tmp("weiss_blowup");
    let cfg = write_cfg(
        &dir,
        "run.cfg",
        "domain.shape = disk\ndomain.radius = 1\ngrid.n = 160\nsolver.alpha = 4\nsolver.area_frac = 0.5\nweiss.radii_cells = 4:12\nblowup.r_max_cells = 16\nblowup.levels = 3\n",
    );
    let wout = dir.join("weiss_out");
    let status = bin()
        .args(["weiss", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&wout)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(wout.join("weiss.csv")).unwrap();
    assert!(csv.starts_with("r,W,e,W1,S,S_over_r2"));
    assert_eq!(csv.lines().count(), 1 + 9); // 4..=12 cells

    let bout = dir.join("blowup_out");
    let status = bin()
        .args(["blowup", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&bout)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(bout.join("blowup.csv")).unwrap();
    assert!(csv.starts_with("r,T,a11,a12,a22,residual,harmonic_defect"));
    assert!(csv.lines().count() >= 3);
}

#[test]
fn diagnose_output_is_thread_count_independent() {
    let dir = tmp("threads");
    let cfg = write_cfg(
        &dir,
        "run.cfg",
        "domain.shape = disk\ndomain.radius = 1\ngrid.n = 72\nsolver.alpha = 10\nsolver.area_frac = 0.5\nsolver.seeds = 1,2,3\n",
    );
    let (o1, o2) = (dir.join("t1"), dir.join("t2"));
    for (out, threads) in [(&o1, "1"), (&o2, "2")] {
        let status = bin()
            .args(["diagnose", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(o1.join("diagnostics.csv")).unwrap();
    let b = std::fs::read(o2.join("diagnostics.csv")).unwrap();
    assert_eq!(a, b, "diagnostics.csv depends on the thread count");
}
