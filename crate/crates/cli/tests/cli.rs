use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rarita-kit"))
        .args(args)
        .env_remove("RARITA_KIT_THREADS")
        .output()
        .expect("spawn rarita-kit")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SMALL_FLOW: &str = r#"
checkpoint_every = 4

[solver]
n = 4
side = 6.283185307179586
epsilon_schedule = [1.0, 0.3]
step = 0.2
max_iters = 6
grad_tol = 1e-10
seed = 11
"#;

#[test]
fn verify_passes_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = kit(&["verify", "--samples", "300", "--seed", "9", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let ra = fs::read(a.join("verify_report.json")).unwrap();
    assert_eq!(ra, fs::read(b.join("verify_report.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert!(v["checks"].as_array().unwrap().len() >= 25);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["failed"], 0);
}

#[test]
fn verify_thread_count_does_not_change_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(threads);
        let o = Command::new(env!("CARGO_BIN_EXE_rarita-kit"))
            .args(["verify", "--samples", "100", "--out", p(&out)])
            .env("RARITA_KIT_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        reports.push(fs::read(out.join("verify_report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn tight_tolerance_failures_are_tolerance_induced() {
    let dir = tempfile::tempdir().unwrap();
    let o = kit(&[
        "verify",
        "--samples",
        "100",
        "--tol-exact",
        "1e-16",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("verify_report.json")).unwrap()).unwrap();
    let failed: Vec<_> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .collect();
    assert!(!failed.is_empty());
    for c in failed {
        assert_eq!(c["failure"], "tolerance_induced", "{}", c["name"]);
    }
}

#[test]
fn verify_config_file_and_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    fs::write(&cfg, "samples = 50\nseed = 3\nbogus = 1\n").unwrap();
    let o = kit(&["verify", "--config", p(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));

    let o = kit(&["verify", "--samples", "0", "--out", p(dir.path())]);
    assert_eq!(code(&o), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_rarita-kit"))
        .args(["verify", "--samples", "10"])
        .env("RARITA_KIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn symbol_scan_writes_csv_and_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = kit(&[
        "symbol-scan",
        "--samples",
        "200",
        "--seed",
        "4",
        "--out",
        p(dir.path()),
    ]);
    // The general symbol is singular, so the injectivity assertion fails.
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("symbol_scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,a,b,c,d,lambda,xi1,xi2,xi3,det,sigma_min"
    );
    assert_eq!(lines.count(), 200);
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("symbol_scan.json")).unwrap()).unwrap();
    assert!(v["regression_max_rel_err"].as_f64().unwrap() < 1e-10);
    assert!(v["slice_max_dev"].as_f64().unwrap() < 1e-12);
}

#[test]
fn flow_missing_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flow.toml");
    fs::write(&cfg, SMALL_FLOW.replace("step = 0.2\n", "")).unwrap();
    let o = kit(&["flow", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("step"), "{}", stderr(&o));
}

#[test]
fn flow_step_above_cap_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flow.toml");
    fs::write(&cfg, SMALL_FLOW.replace("step = 0.2", "step = 5.0")).unwrap();
    let o = kit(&["flow", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("step"), "{}", stderr(&o));
}

#[test]
fn flow_missing_file_is_io_error() {
    let o = kit(&["flow", "/nonexistent/flow.toml"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("/nonexistent/flow.toml"));
}

#[test]
fn flow_resume_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flow.toml");
    fs::write(&cfg, SMALL_FLOW).unwrap();
    let fresh = dir.path().join("fresh");
    let o = kit(&["flow", p(&cfg), "--out", p(&fresh)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in [
        "flow_report.json",
        "trace.csv",
        "flow_config.toml",
        "final/psi.bin",
        "final/conn.bin",
        "final/psi.bin.meta",
    ] {
        assert!(fresh.join(f).exists(), "{f}");
    }

    let ckpt = fresh.join("checkpoints").join("s00_i000004");
    let resumed = dir.path().join("resumed");
    let o = kit(&["flow", p(&cfg), "--out", p(&resumed), "--resume", p(&ckpt)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    for f in ["final/psi.bin", "final/conn.bin"] {
        assert_eq!(
            fs::read(fresh.join(f)).unwrap(),
            fs::read(resumed.join(f)).unwrap(),
            "{f}"
        );
    }
    let a = fs::read_to_string(fresh.join("trace.csv")).unwrap();
    let b = fs::read_to_string(resumed.join("trace.csv")).unwrap();
    let a: Vec<&str> = a.lines().collect();
    let b: Vec<&str> = b.lines().collect();
    // Header plus the four steps taken before the checkpoint.
    assert_eq!(a.len(), b.len() + 4);
    assert_eq!(&a[5..], &b[1..]);

    let meta = fs::read_to_string(ckpt.join("psi.bin.meta")).unwrap();
    assert!(meta.contains("seed = 11"));
    assert!(meta.contains("stage = 0"));
    assert!(meta.contains("iteration = 4"));
}

#[test]
fn flow_resume_with_other_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flow.toml");
    fs::write(&cfg, SMALL_FLOW).unwrap();
    let out = dir.path().join("run");
    assert_eq!(code(&kit(&["flow", p(&cfg), "--out", p(&out)])), 0);
    let o = kit(&[
        "flow",
        p(&cfg),
        "--seed",
        "12",
        "--resume",
        p(&out.join("final")),
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn non_finite_state_exits_with_divergence_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flow.toml");
    fs::write(&cfg, SMALL_FLOW).unwrap();
    let out = dir.path().join("run");
    assert_eq!(code(&kit(&["flow", p(&cfg), "--out", p(&out)])), 0);
    let psi = out.join("final").join("psi.bin");
    let mut bytes = fs::read(&psi).unwrap();
    bytes[40..48].copy_from_slice(&f64::NAN.to_le_bytes());
    fs::write(&psi, bytes).unwrap();
    let meta = out.join("final").join("psi.bin.meta");
    let text = fs::read_to_string(&meta)
        .unwrap()
        .replace("stage = 2", "stage = 1");
    fs::write(&meta, text).unwrap();
    let o = kit(&[
        "flow",
        p(&cfg),
        "--resume",
        p(&out.join("final")),
        "--out",
        p(&dir.path().join("x")),
    ]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(
        stderr(&o).contains("diverged") || stderr(&o).contains("non-finite"),
        "{}",
        stderr(&o)
    );
}
