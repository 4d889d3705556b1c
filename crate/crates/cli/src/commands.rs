use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rarita_core::flow::{initial_state, run_flow_from, FlowConfig, FlowState, TraceRow};
use rarita_core::lattice::checkpoint::{
    read_connection, read_meta, read_spinor_field, write_connection, write_spinor_field,
};
use rarita_core::verify::{run_suite, symbol_scan as scan, SuiteConfig};

use crate::error::{CliError, CliResult};
use crate::{FlowArgs, ScanArgs, VerifyArgs};

const DEFAULT_OUT: &str = "rarita-out";

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_text(path, &text)
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Failed(format!("{}: {other:?}", path.display())),
    }
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyFile {
    samples: Option<usize>,
    tol_exact: Option<f64>,
    tol_fd: Option<f64>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
}

pub fn verify(args: VerifyArgs) -> CliResult<()> {
    let file: VerifyFile = match &args.config {
        Some(p) => read_toml(p)?,
        None => VerifyFile::default(),
    };
    let d = SuiteConfig::default();
    let config = SuiteConfig {
        samples: args.samples.or(file.samples).unwrap_or(d.samples),
        tol_exact: args.tol_exact.or(file.tol_exact).unwrap_or(d.tol_exact),
        tol_fd: args.tol_fd.or(file.tol_fd).unwrap_or(d.tol_fd),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
    };
    let out = args
        .out
        .or(file.output_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let report = run_suite(&config)?;
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{tag} {:<40} worst {:.3e} tol {:.1e} n {}",
            c.name, c.worst_error, c.tolerance, c.samples
        );
        if let Some(k) = c.failure {
            line.push_str(&format!(
                " [{}]",
                serde_json::to_value(k)
                    .expect("enum")
                    .as_str()
                    .unwrap_or("")
            ));
        }
        if let Some(d) = &c.detail {
            line.push_str(&format!(" ({d})"));
        }
        println!("{line}");
    }
    println!(
        "{} checks, {} passed, {} failed (seed {})",
        report.total, report.passed, report.failed, report.seed
    );

    create_dir(&out)?;
    write_json(&out.join("verify_report.json"), &report)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {} checks failed",
            report.failed, report.total
        )))
    }
}

// ---------------------------------------------------------------- symbol-scan

pub fn symbol_scan(args: ScanArgs) -> CliResult<()> {
    if args.samples == 0 {
        return Err(CliError::Config("samples: must be at least 1".into()));
    }
    let (summary, rows) = scan(args.seed, args.samples)?;
    create_dir(&args.out)?;
    let seed = args.seed.to_string();
    write_csv(
        &args.out.join("symbol_scan.csv"),
        &[
            "seed",
            "a",
            "b",
            "c",
            "d",
            "lambda",
            "xi1",
            "xi2",
            "xi3",
            "det",
            "sigma_min",
        ],
        rows.iter().map(|r| {
            let mut v = vec![seed.clone()];
            v.extend(
                [
                    r.a,
                    r.b,
                    r.c,
                    r.d,
                    r.lambda,
                    r.xi1,
                    r.xi2,
                    r.xi3,
                    r.det,
                    r.sigma_min,
                ]
                .map(|x| x.to_string()),
            );
            v
        }),
    )?;
    write_json(&args.out.join("symbol_scan.json"), &summary)?;
    println!(
        "samples {}  min det {:.3e}  max |det| {:.3e}  min sigma_min {:.3e}  min sigma_min/sigma_max {:.3e}",
        summary.samples, summary.min_det, summary.max_abs_det, summary.min_sigma_min, summary.min_sigma_ratio
    );
    println!(
        "regression: max rel err {:.3e}  slice deviation {:.3e}  scaling deviation {:.3e}",
        summary.regression_max_rel_err, summary.slice_max_dev, summary.scaling_max_rel_dev
    );
    if summary.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "symbol injectivity scan failed: min det {:.3e} is not > 0",
            summary.min_det
        )))
    }
}

// ---------------------------------------------------------------- flow

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
    /// 0 disables intermediate checkpoints.
    #[serde(default)]
    checkpoint_every: usize,
    solver: FlowConfig,
}

fn checkpoint_meta(config: &FlowConfig, state: &FlowState) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("seed".to_string(), config.seed.to_string());
    m.insert("stage".to_string(), state.stage.to_string());
    m.insert("iteration".to_string(), state.iteration.to_string());
    m
}

fn write_checkpoint(dir: &Path, config: &FlowConfig, state: &FlowState) -> rarita_core::Result<()> {
    fs::create_dir_all(dir).map_err(|source| rarita_core::Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let meta = checkpoint_meta(config, state);
    write_spinor_field(&dir.join("psi.bin"), &state.psi, &meta)?;
    write_connection(&dir.join("conn.bin"), &state.conn, &meta)
}

fn meta_usize(meta: &BTreeMap<String, String>, key: &str, path: &Path) -> CliResult<usize> {
    meta.get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Config(format!("{}: missing or invalid `{key}`", path.display())))
}

fn load_checkpoint(dir: &Path, config: &FlowConfig) -> CliResult<FlowState> {
    let psi_path = dir.join("psi.bin");
    let psi = read_spinor_field(&psi_path)?;
    let conn = read_connection(&dir.join("conn.bin"))?;
    let meta = read_meta(&psi_path)?;
    let seed = meta_usize(&meta, "seed", &psi_path)? as u64;
    if seed != config.seed {
        return Err(CliError::Config(format!(
            "checkpoint seed {seed} does not match configured seed {}",
            config.seed
        )));
    }
    Ok(FlowState {
        conn,
        psi,
        stage: meta_usize(&meta, "stage", &psi_path)?,
        iteration: meta_usize(&meta, "iteration", &psi_path)?,
    })
}

fn trace_rows(seed: u64, trace: &[TraceRow]) -> impl Iterator<Item = Vec<String>> + '_ {
    trace.iter().map(move |r| {
        vec![
            seed.to_string(),
            r.stage.to_string(),
            r.epsilon.to_string(),
            r.iteration.to_string(),
            r.energy.to_string(),
            r.rs.to_string(),
            r.curvature.to_string(),
            r.penalty.to_string(),
            r.grad_norm.to_string(),
            r.step.to_string(),
            r.l4_violation.to_string(),
        ]
    })
}

pub fn flow(args: FlowArgs) -> CliResult<()> {
    let mut file: FlowFile = read_toml(&args.config)?;
    if let Some(s) = args.seed {
        file.solver.seed = s;
    }
    if let Some(k) = args.checkpoint_every {
        file.checkpoint_every = k;
    }
    let out = args
        .out
        .clone()
        .or_else(|| file.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    file.output_dir = Some(out.clone());
    let config = file.solver.clone();
    config
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let state = match &args.resume {
        Some(dir) => load_checkpoint(dir, &config)?,
        None => initial_state(&config)?,
    };
    create_dir(&out)?;
    write_text(
        &out.join("flow_config.toml"),
        &toml::to_string(&file).expect("config serializes"),
    )?;

    let every = file.checkpoint_every;
    let ckpt_root = out.join("checkpoints");
    let (report, last) = run_flow_from(&config, state, |s| {
        if every > 0 && s.iteration % every == 0 {
            let dir = ckpt_root.join(format!("s{:02}_i{:06}", s.stage, s.iteration));
            write_checkpoint(&dir, &config, s)?;
        }
        Ok(())
    })?;

    write_checkpoint(&out.join("final"), &config, &last)?;
    write_json(&out.join("flow_report.json"), &report)?;
    write_csv(
        &out.join("trace.csv"),
        &[
            "seed",
            "stage",
            "epsilon",
            "iteration",
            "energy",
            "rs",
            "curvature",
            "penalty",
            "grad_norm",
            "step",
            "l4_violation",
        ],
        trace_rows(config.seed, &report.trace),
    )?;

    for s in &report.stages {
        println!(
            "stage {} eps {:.3e}: {:?} after {} iterations, energy {:.6e} -> {:.6e}, |grad| {:.3e}",
            s.stage,
            s.epsilon,
            s.status,
            s.iterations,
            s.initial_energy,
            s.final_energy,
            s.final_grad_norm
        );
    }
    let r = &report.final_residuals;
    println!(
        "degenerate residuals: rs {:.3e} moment {:.3e} kerc {:.3e} l4 {:.3e}",
        r.rs_residual, r.curvature_residual, r.kerc_residual, r.l4_constraint
    );
    match (&report.fueter, &report.fueter_skipped) {
        (Some(f), _) => println!(
            "fueter residual {:.3e} (min |psi| {:.3e})",
            f.fueter_residual, f.min_site_norm
        ),
        (None, Some(why)) => println!("no W0 section emitted: {why}"),
        (None, None) => {}
    }
    println!("wrote {}", out.display());
    Ok(())
}
