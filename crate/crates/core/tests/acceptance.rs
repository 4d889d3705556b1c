//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.
//!
//! Run with `cargo test -p rarita-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rarita_core::verify::{run_check, symbol_scan, CheckResult, SuiteConfig};

const SEED: u64 = 20_240_601;

struct Line {
    id: u32,
    passed: bool,
    text: String,
}

fn config() -> SuiteConfig {
    SuiteConfig {
        samples: 10_000,
        tol_exact: 1e-12,
        tol_fd: 1e-8,
        seed: SEED,
    }
}

fn run(names: &[&str]) -> Vec<CheckResult> {
    let cfg = config();
    names
        .iter()
        .map(|n| run_check(n, &cfg).unwrap_or_else(|| panic!("unknown check {n}")))
        .collect()
}

fn summarize(results: &[CheckResult]) -> (bool, String) {
    let passed = results.iter().all(|r| r.passed);
    let parts: Vec<String> = results
        .iter()
        .map(|r| {
            let mut s = format!(
                "{} {:.2e}/{:.0e} n={}",
                r.name, r.worst_error, r.tolerance, r.samples
            );
            if let Some(d) = &r.detail {
                s.push_str(&format!(" ({d})"));
            }
            s
        })
        .collect();
    (passed, parts.join("; "))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut lines = Vec::new();

    let (r, dt) = timed(|| run(&["moduli.w_moment_vanishing"]));
    let (ok, text) = summarize(&r);
    let budget = 1.0;
    lines.push(Line {
        id: 1,
        passed: ok && dt.as_secs_f64() < budget,
        text: format!(
            "W1/W2 moment map vanishes: {text}; {:.3}s (< {budget}s)",
            dt.as_secs_f64()
        ),
    });

    let (ok, text) = summarize(&run(&[
        "moduli.chart_validity",
        "moduli.kernel_solution_formula",
    ]));
    lines.push(Line {
        id: 2,
        passed: ok,
        text: format!("chart validity and kernel formula: {text}"),
    });

    let (ok, text) = summarize(&run(&[
        "moduli.kernel_matrix_rank",
        "moduli.kernel_matrix_rows",
    ]));
    lines.push(Line {
        id: 3,
        passed: ok,
        text: format!("kernel systems have rank 3: {text}"),
    });

    let (ok, text) = summarize(&run(&[
        "moduli.frame_orthogonality",
        "moduli.frame_ranks",
        "moduli.normal_line_invariance",
    ]));
    lines.push(Line {
        id: 4,
        passed: ok,
        text: format!("frame ledger: {text}"),
    });

    let ((reg, scan), dt) = timed(|| {
        let reg = run(&["moduli.symbol_det_regression"]);
        let scan = symbol_scan(SEED, 10_000).expect("symbol scan");
        (reg, scan)
    });
    let (reg_ok, reg_text) = summarize(&reg);
    let s = &scan.0;
    lines.push(Line {
        id: 5,
        passed: reg_ok && s.passed && dt.as_secs_f64() < 30.0,
        text: format!(
            "symbol determinant: {reg_text}; general scan n={} min det {:.3e}, max |det| {:.3e}, min sigma_min/sigma_max {:.3e} (need det > 0 and ratio > 1e-10); {:.2}s",
            s.samples,
            s.min_det,
            s.max_abs_det,
            s.min_sigma_ratio,
            dt.as_secs_f64()
        ),
    });

    let (ok, text) = summarize(&run(&[
        "lattice.dirac_self_adjoint",
        "lattice.plane_wave_order",
        "lattice.residual_gauge_invariance",
    ]));
    let mut rng = rarita_core::rng::rng_for(SEED, "lattice.plane_wave_order");
    let errs = rarita_core::verify::plane_wave_errors(&mut rng).expect("plane waves");
    let orders = rarita_core::verify::observed_orders(&errs);
    lines.push(Line {
        id: 6,
        passed: ok,
        text: format!("discrete operator contracts: {text}; plane-wave orders {orders:.3?}"),
    });

    let (ok, text) = summarize(&run(&["fueter.haydys_forward", "fueter.haydys_backward"]));
    lines.push(Line {
        id: 7,
        passed: ok,
        text: format!("Haydys correspondence: {text}"),
    });

    let (ok, text) = summarize(&run(&["fueter.linearization_fd"]));
    lines.push(Line {
        id: 8,
        passed: ok,
        text: format!("Fueter linearization: {text}"),
    });

    let (ok, text) = summarize(&run(&["flow.gradient_fd", "flow.energy_monotone"]));
    let total = start.elapsed().as_secs_f64();
    lines.push(Line {
        id: 9,
        passed: ok && total < 600.0,
        text: format!("flow solver: {text}; criteria 1-9 took {total:.1}s (< 600s)"),
    });

    let mut failed = 0;
    for l in &lines {
        let tag = if l.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {}", l.id, l.text);
        failed += usize::from(!l.passed);
    }
    println!("{} passed, {} failed", lines.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
