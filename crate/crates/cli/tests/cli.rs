use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qha_core::tf::stft;
use qha_core::{io, Domain, Fixtures, QhaContext, Signal, Window};
use serde_json::Value;
use tempfile::TempDir;

fn qha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qha")).args(args).output().expect("run qha")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn stft_matches_library() {
    let ctx = QhaContext::new(8).unwrap();
    let psi = Fixtures::new(&ctx, 3).signal();
    let dir = tempfile::tempdir().unwrap();
    let sp = write(&dir, "psi.csv", &io::write_signal(&psi));
    let out = qha(&["stft", "--n", "8", "--signal", s(&sp), "--window", "chirp-gaussian"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let got = io::read_phase_fn(&String::from_utf8(out.stdout).unwrap(), &ctx).unwrap();
    let want = stft(&psi, &Window::ChirpGaussian.signal(&ctx)).unwrap();
    assert!(got.max_abs_diff(&want) < 1e-14);
}

#[test]
fn localize_report_has_measure_identity() {
    let ctx = QhaContext::new(8).unwrap();
    let mut fx = Fixtures::new(&ctx, 11);
    let dir = tempfile::tempdir().unwrap();
    let d = fx.domain();
    let dp = write(&dir, "omega.csv", &io::write_domain(&d));
    let sp = write(&dir, "s.csv", &io::write_operator(fx.mixed_state(2).op()));
    let out = qha(&["localize", "--n", "8", "--domain", s(&dp), "--state", s(&sp)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "localize");
    assert_eq!(v["n"], 8);
    assert!(v["tolerances"]["zero_tol"].is_number());
    assert!(v["tolerances"]["deconv_tol"].is_number());
    let mu = d.count() as f64 / 8.0;
    assert!((v["eigen_sum"].as_f64().unwrap() - mu).abs() < 1e-10);
    assert_eq!(v["measure_exact"].as_str().unwrap(), d.measure().to_string());
    let checks = v["checks"].as_object().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.values().all(|c| c["pass"] == Value::Bool(true)));
}

#[test]
fn reconstruct_domain_round_trip() {
    let ctx = QhaContext::new(8).unwrap();
    let mut fx = Fixtures::new(&ctx, 5);
    let dir = tempfile::tempdir().unwrap();
    let d = fx.domain();
    let state = qha_core::MixedState::pure(&Window::ChirpGaussian.signal(&ctx)).unwrap();
    let h = qha_core::localization::mixed_state_loc(&d, &state).unwrap();
    let hp = write(&dir, "h.csv", &io::write_operator(&h));
    let sp = write(&dir, "s.csv", &io::write_operator(state.op()));
    let out = qha(&["reconstruct-domain", "--n", "8", "--filter", s(&hp), "--state", s(&sp)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let got = io::read_domain(&String::from_utf8(out.stdout).unwrap(), &ctx).unwrap();
    assert_eq!(got, d);
}

#[test]
fn reconstruct_domain_refuses_impulse_state() {
    let ctx = QhaContext::new(8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let e0 = Signal::basis(&ctx, 0);
    let state = qha_core::MixedState::pure(&e0).unwrap();
    let h = qha_core::localization::mixed_state_loc(&Domain::full(&ctx), &state).unwrap();
    let hp = write(&dir, "h.csv", &io::write_operator(&h));
    let sp = write(&dir, "s.csv", &io::write_operator(state.op()));
    let out = qha(&["reconstruct-domain", "--n", "8", "--filter", s(&hp), "--state", s(&sp)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: zero-spreading:"));
}

#[test]
fn missing_file_exits_3() {
    let out = qha(&["stft", "--n", "8", "--signal", "/nonexistent/psi.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error: io:"));
}

#[test]
fn malformed_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "psi.csv", "# qha signal n=8\nn,re,im\n0,1.0\n");
    let out = qha(&["stft", "--n", "8", "--signal", s(&p)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("psi.csv"));
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(qha(&["stft", "--n", "8"]).status.code(), Some(1));
    assert_eq!(qha(&["no-such-command"]).status.code(), Some(1));
    let out = qha(&["selftest", "--n", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: invalid-dimension:"));
    let out = qha(&["selftest", "--n", "8", "--zero-tol", "-1"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));

    let ctx = QhaContext::new(8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let sp = write(&dir, "psi.csv", &io::write_signal(&Fixtures::new(&ctx, 0).signal()));
    let out = qha(&["stft", "--n", "8", "--signal", s(&sp), "--window", "hann"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: unknown-preset:"));
}

#[test]
fn invalid_thread_count_exits_1() {
    let out = Command::new(env!("CARGO_BIN_EXE_qha"))
        .args(["selftest", "--n", "4"])
        .env("QHA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error: invalid-args:"));
}

#[test]
fn selftest_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let report = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_qha"))
            .args(["selftest", "--n", "5", "--seed", "3", "--report", s(&report)])
            .env("QHA_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        (out.stdout, std::fs::read(report).unwrap())
    };
    let (a, b) = (run("1", "a.json"), run("4", "b.json"));
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a.1).unwrap();
    assert_eq!(v["n"], 5);
    assert!(v["checks"].as_object().unwrap().len() > 20);
}

#[test]
fn random_fixture_is_seeded() {
    let a = qha(&["random-fixture", "--n", "4", "--kind", "state", "--rank", "2", "--seed", "9"]);
    let b = qha(&["random-fixture", "--n", "4", "--kind", "state", "--rank", "2", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let ctx = QhaContext::new(4).unwrap();
    let op = io::read_operator(&String::from_utf8(a.stdout).unwrap(), &ctx).unwrap();
    assert_eq!(op, Fixtures::new(&ctx, 9).mixed_state(2).op().clone());
}

#[test]
fn klm_check_reports_positive_kernel() {
    let out = qha(&["klm-check", "--n", "5", "--kernel", "spectrogram:gaussian", "--full-grid", "--tuples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"]["all_tuples_psd"]["pass"], true);
    assert_eq!(v["checks"]["full_grid_psd"]["pass"], true);
}

#[test]
fn wigner_kernel_is_not_positive() {
    let out = qha(&["klm-check", "--n", "5", "--kernel", "wigner", "--full-grid"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"]["full_grid_psd"]["pass"], false);
}
