//! Projected gradient descent on the blow-up residual energy
//!
//! ```text
//! E(A, ψ) = ‖π D_A ψ‖² + ‖ε² ⋆F_A − μ(ψ)‖² + p ‖c ψ‖²
//! ```
//!
//! over the sphere `‖ψ‖_{L⁴} = 1`, with continuation along a decreasing
//! schedule of `ε`. The `ψ`-gradient is projected onto the tangent space of the
//! sphere, a step is retracted by rescaling, and step sizes come from Armijo
//! backtracking. Everything is sequential or per-site parallel with ordered
//! reductions, so a run is bit-for-bit reproducible from its seed.

use serde::{Deserialize, Serialize};

use crate::clifford::ImQuaternion;
use crate::error::{Error, Result};
use crate::lattice::{
    curl_adjoint, curvature_defect, dirac_twisted, fueter_residual, haydys_forward, residuals,
    LatticeGeometry, ResidualMode, Residuals, SpinorHomField, U1Connection,
};
use crate::rng::{normal, rng_for};
use crate::spinor_hom::{
    circle_act, circle_generator, clifford_contract, contract_adjoint, moment_diff_adjoint,
    project_threehalf, right_act, SpinorHom,
};

pub const DEFAULT_PENALTY: f64 = 1e3;

fn default_penalty() -> f64 {
    DEFAULT_PENALTY
}
fn default_armijo() -> f64 {
    1e-4
}
fn default_backtracks() -> usize {
    40
}
fn default_init_connection_scale() -> f64 {
    0.1
}
fn default_emit_tol() -> f64 {
    1e-3
}

/// Flow parameters. Field names are the configuration-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Sites per axis.
    pub n: usize,
    /// Side length of the torus.
    pub side: f64,
    /// Strictly decreasing, non-negative values of `ε`.
    pub epsilon_schedule: Vec<f64>,
    /// Initial trial step of every line search; at most `h²/12`.
    pub step: f64,
    /// Iteration budget per stage.
    pub max_iters: usize,
    /// Stage stops once the projected gradient norm is at most this.
    pub grad_tol: f64,
    pub seed: u64,
    #[serde(default = "default_penalty")]
    pub penalty: f64,
    /// Project `ψ` onto `ker c` after every step instead of relying on the penalty alone.
    #[serde(default)]
    pub hard_projection: bool,
    #[serde(default = "default_armijo")]
    pub armijo: f64,
    #[serde(default = "default_backtracks")]
    pub max_backtracks: usize,
    /// Standard deviation of the random initial connection.
    #[serde(default = "default_init_connection_scale")]
    pub init_connection_scale: f64,
    /// Residual threshold below which the final state is pushed to a section of `W₀`.
    #[serde(default = "default_emit_tol")]
    pub emit_tol: f64,
}

impl FlowConfig {
    pub fn geometry(&self) -> Result<LatticeGeometry> {
        LatticeGeometry::new(self.n, self.side)
    }

    /// Largest admissible `step`: `1/‖D‖²` with `‖D‖ ≤ 2√3/h`.
    pub fn step_cap(&self) -> Result<f64> {
        let h = self.geometry()?.h;
        Ok(h * h / 12.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let cap = self
            .step_cap()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if self.epsilon_schedule.is_empty() {
            return bad("epsilon_schedule: must not be empty".into());
        }
        for (k, e) in self.epsilon_schedule.iter().enumerate() {
            if !e.is_finite() || *e < 0.0 {
                return bad(format!(
                    "epsilon_schedule[{k}]: must be finite and non-negative, got {e}"
                ));
            }
        }
        for w in self.epsilon_schedule.windows(2) {
            if w[1] >= w[0] {
                return bad(format!(
                    "epsilon_schedule: must be strictly decreasing ({} then {})",
                    w[0], w[1]
                ));
            }
        }
        if !(self.step > 0.0 && self.step <= cap) {
            return bad(format!(
                "step: must lie in (0, {cap:e}] (h²/12), got {}",
                self.step
            ));
        }
        if !(self.grad_tol > 0.0) {
            return bad(format!("grad_tol: must be positive, got {}", self.grad_tol));
        }
        if !(self.penalty >= 0.0 && self.penalty.is_finite()) {
            return bad(format!(
                "penalty: must be finite and non-negative, got {}",
                self.penalty
            ));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad(format!("armijo: must lie in (0, 1), got {}", self.armijo));
        }
        if self.max_backtracks == 0 {
            return bad("max_backtracks: must be at least 1".into());
        }
        if !(self.init_connection_scale >= 0.0) {
            return bad("init_connection_scale: must be non-negative".into());
        }
        if !(self.emit_tol > 0.0) {
            return bad("emit_tol: must be positive".into());
        }
        Ok(())
    }
}

/// The evolving configuration plus its position in the schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub conn: U1Connection,
    pub psi: SpinorHomField,
    pub stage: usize,
    /// Iterations already completed in `stage`.
    pub iteration: usize,
}

/// Seeded Gaussian start: `ψ` projected to `ker c` and normalized, `a` small.
pub fn initial_state(config: &FlowConfig) -> Result<FlowState> {
    let geom = config.geometry()?;
    let mut rng = rng_for(config.seed, "flow.init.psi");
    let values: Vec<SpinorHom> = (0..geom.sites())
        .map(|_| {
            let v: Vec<f64> = (0..12).map(|_| normal(&mut rng)).collect();
            project_threehalf(&SpinorHom::from_reals(&v))
        })
        .collect();
    let psi = SpinorHomField { geom, values };
    let psi = psi.scale(1.0 / psi.norm_l4());
    let mut rng = rng_for(config.seed, "flow.init.conn");
    let s = config.init_connection_scale;
    let conn = U1Connection::from_fn(geom, |_| {
        [
            s * normal(&mut rng),
            s * normal(&mut rng),
            s * normal(&mut rng),
        ]
    });
    Ok(FlowState {
        conn,
        psi,
        stage: 0,
        iteration: 0,
    })
}

/// The three summands of the energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub rs: f64,
    pub curvature: f64,
    pub penalty: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.rs + self.curvature + self.penalty
    }
}

pub fn energy_terms(
    conn: &U1Connection,
    psi: &SpinorHomField,
    epsilon: f64,
    penalty: f64,
) -> Result<EnergyTerms> {
    let r = residuals(conn, psi, epsilon, ResidualMode::Blowup)?;
    Ok(EnergyTerms {
        rs: r.rs_residual * r.rs_residual,
        curvature: r.curvature_residual * r.curvature_residual,
        penalty: penalty * r.kerc_residual * r.kerc_residual,
    })
}

pub fn energy(
    conn: &U1Connection,
    psi: &SpinorHomField,
    epsilon: f64,
    penalty: f64,
) -> Result<f64> {
    energy_terms(conn, psi, epsilon, penalty).map(|t| t.total())
}

/// `L²` gradient `(∇_A E, ∇_ψ E)`.
pub fn gradient(
    conn: &U1Connection,
    psi: &SpinorHomField,
    epsilon: f64,
    penalty: f64,
) -> Result<(U1Connection, SpinorHomField)> {
    if epsilon < 0.0 {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    let geom = psi.geom;
    let h = geom.h;
    let r = dirac_twisted(conn, psi)?.map(project_threehalf);
    let m = curvature_defect(conn, psi, epsilon, ResidualMode::Blowup);
    let dr = dirac_twisted(conn, &r)?;
    let gpsi = SpinorHomField::from_fn(geom, |i| {
        let p = &psi.values[i];
        dr.values[i].scale(2.0) - moment_diff_adjoint(p, &m[i]).scale(2.0)
            + contract_adjoint(clifford_contract(p)).scale(2.0 * penalty)
    });

    let w: Vec<[f64; 3]> = m.iter().map(|v| v.to_imh().to_array()).collect();
    let curv = curl_adjoint(geom, &w);
    let e2 = 2.0 * epsilon * epsilon;
    let ga = U1Connection::from_fn(geom, |i| {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let ip = geom.neighbor(i, k, true);
            let a = conn.a[i][k];
            let ek = ImQuaternion::basis(k);
            let fwd = right_act(ek, &circle_generator(&circle_act(h * a, &psi.values[ip])));
            let bwd = right_act(ek, &circle_generator(&circle_act(-h * a, &psi.values[i])));
            *o = r.values[i].inner(&fwd) + r.values[ip].inner(&bwd) + e2 * curv[i][k];
        }
        out
    });
    Ok((ga, gpsi))
}

/// Remove from `g` its component along the normal `4|ψ|²ψ` of the `L⁴` sphere.
fn tangent_projection(psi: &SpinorHomField, g: &SpinorHomField) -> SpinorHomField {
    let normal = psi.map(|v| v.scale(4.0 * v.norm_sqr()));
    let nn = normal.inner(&normal);
    if nn == 0.0 {
        return g.clone();
    }
    g.axpy(-g.inner(&normal) / nn, &normal)
}

fn normalize_l4(psi: &SpinorHomField) -> SpinorHomField {
    let n = psi.norm_l4();
    if n == 0.0 {
        psi.clone()
    } else {
        psi.scale(1.0 / n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Converged,
    MaxIters,
    /// No step passed the Armijo test within the backtracking budget.
    Stalled,
}

/// One accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub stage: usize,
    pub epsilon: f64,
    pub iteration: usize,
    /// Energy after the step.
    pub energy: f64,
    pub rs: f64,
    pub curvature: f64,
    pub penalty: f64,
    /// Projected gradient norm before the step.
    pub grad_norm: f64,
    pub step: f64,
    pub l4_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub epsilon: f64,
    pub iterations: usize,
    pub status: StageStatus,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub final_grad_norm: f64,
    pub residuals: Residuals,
}

/// The induced section of `W₀` at the end of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FueterEmission {
    pub fueter_residual: f64,
    pub min_site_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub seed: u64,
    pub config: FlowConfig,
    pub stages: Vec<StageReport>,
    pub trace: Vec<TraceRow>,
    /// Residuals of the degenerate system at the final state.
    pub final_residuals: Residuals,
    pub fueter: Option<FueterEmission>,
    /// Why no section was emitted, when none was.
    pub fueter_skipped: Option<String>,
}

/// Run the whole schedule from the seeded initial state.
pub fn run_flow(config: &FlowConfig) -> Result<(FlowReport, FlowState)> {
    let state = initial_state(config)?;
    run_flow_from(config, state, |_| Ok(()))
}

/// Continue from `state`. `on_step` sees the state after every accepted step.
pub fn run_flow_from(
    config: &FlowConfig,
    mut state: FlowState,
    mut on_step: impl FnMut(&FlowState) -> Result<()>,
) -> Result<(FlowReport, FlowState)> {
    config.validate()?;
    let geom = config.geometry()?;
    if state.psi.geom != geom || state.conn.geom != geom {
        return Err(Error::GeometryMismatch(
            "initial fields do not match the configured lattice".into(),
        ));
    }
    if state.stage > config.epsilon_schedule.len() {
        return Err(Error::InvalidConfig(format!(
            "resume stage {} is past the schedule",
            state.stage
        )));
    }
    let mut stages = Vec::new();
    let mut trace = Vec::new();
    let p = config.penalty;

    while state.stage < config.epsilon_schedule.len() {
        let stage = state.stage;
        let eps = config.epsilon_schedule[stage];
        let mut e = energy(&state.conn, &state.psi, eps, p)?;
        let initial_energy = e;
        let status;
        let mut gnorm;
        loop {
            if !e.is_finite() {
                return Err(Error::Diverged {
                    stage,
                    iteration: state.iteration,
                    energy: e,
                });
            }
            let (ga, gpsi) = gradient(&state.conn, &state.psi, eps, p)?;
            let gpsi = if config.hard_projection {
                gpsi.map(project_threehalf)
            } else {
                gpsi
            };
            let gpsi = tangent_projection(&state.psi, &gpsi);
            gnorm = (ga.inner(&ga) + gpsi.inner(&gpsi)).sqrt();
            if gnorm <= config.grad_tol {
                status = StageStatus::Converged;
                break;
            }
            if state.iteration >= config.max_iters {
                status = StageStatus::MaxIters;
                break;
            }
            let mut t = config.step;
            let mut accepted = None;
            for _ in 0..config.max_backtracks {
                let mut cand = state.psi.axpy(-t, &gpsi);
                if config.hard_projection {
                    cand = cand.map(project_threehalf);
                }
                let cand = normalize_l4(&cand);
                let conn = state.conn.axpy(-t, &ga);
                let terms = energy_terms(&conn, &cand, eps, p)?;
                let en = terms.total();
                if en.is_finite() && en <= e - config.armijo * t * gnorm * gnorm {
                    accepted = Some((conn, cand, terms));
                    break;
                }
                t *= 0.5;
            }
            let Some((conn, cand, terms)) = accepted else {
                status = StageStatus::Stalled;
                break;
            };
            let l4_violation = (cand.norm_l4() - 1.0).abs();
            state.conn = conn;
            state.psi = cand;
            e = terms.total();
            trace.push(TraceRow {
                stage,
                epsilon: eps,
                iteration: state.iteration,
                energy: e,
                rs: terms.rs,
                curvature: terms.curvature,
                penalty: terms.penalty,
                grad_norm: gnorm,
                step: t,
                l4_violation,
            });
            state.iteration += 1;
            on_step(&state)?;
        }
        stages.push(StageReport {
            stage,
            epsilon: eps,
            iterations: state.iteration,
            status,
            initial_energy,
            final_energy: e,
            final_grad_norm: gnorm,
            residuals: residuals(&state.conn, &state.psi, eps, ResidualMode::Blowup)?,
        });
        state.stage += 1;
        state.iteration = 0;
    }

    let final_residuals = residuals(&state.conn, &state.psi, 0.0, ResidualMode::Degenerate)?;
    let (fueter, fueter_skipped) = emit_fueter(config, &state, &final_residuals);
    let report = FlowReport {
        seed: config.seed,
        config: config.clone(),
        stages,
        trace,
        final_residuals,
        fueter,
        fueter_skipped,
    };
    Ok((report, state))
}

fn emit_fueter(
    config: &FlowConfig,
    state: &FlowState,
    res: &Residuals,
) -> (Option<FueterEmission>, Option<String>) {
    let tol = config.emit_tol;
    if res.kerc_residual > tol || res.curvature_residual > tol {
        return (
            None,
            Some(format!(
                "residuals above emit_tol {tol:e}: kerc {:e}, moment {:e}",
                res.kerc_residual, res.curvature_residual
            )),
        );
    }
    let min_norm = state.psi.min_site_norm();
    if min_norm == 0.0 {
        return (None, Some("psi vanishes at some site".into()));
    }
    let psi = state.psi.map(project_threehalf);
    match haydys_forward(&state.conn, &psi, tol).and_then(|(b, phi)| fueter_residual(&b, &phi)) {
        Ok(r) => (
            Some(FueterEmission {
                fueter_residual: r,
                min_site_norm: min_norm,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Spinor;
    use crate::lattice::gauge_transform;
    use crate::moduli::w1;
    use crate::rng::gaussian_spinor_hom;

    fn config() -> FlowConfig {
        let side = std::f64::consts::TAU;
        let h: f64 = side / 4.0;
        FlowConfig {
            n: 4,
            side,
            epsilon_schedule: vec![1.0, 0.3],
            step: h * h / 12.0,
            max_iters: 15,
            grad_tol: 1e-9,
            seed: 5,
            penalty: DEFAULT_PENALTY,
            hard_projection: false,
            armijo: 1e-4,
            max_backtracks: 40,
            init_connection_scale: 0.1,
            emit_tol: 1e-3,
        }
    }

    fn random_state(seed: u64) -> FlowState {
        let mut c = config();
        c.seed = seed;
        initial_state(&c).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let st = random_state(3);
        let g = st.psi.geom;
        // Leave ker c so the penalty term contributes.
        let mut rng = rng_for(3, "grad_dir");
        let psi = st.psi.axpy(
            0.1,
            &SpinorHomField {
                geom: g,
                values: (0..g.sites())
                    .map(|_| gaussian_spinor_hom(&mut rng))
                    .collect(),
            },
        );
        let eps = 0.7;
        let p = 10.0;
        let (ga, gp) = gradient(&st.conn, &psi, eps, p).unwrap();
        for _ in 0..5 {
            let dv = SpinorHomField {
                geom: g,
                values: (0..g.sites())
                    .map(|_| gaussian_spinor_hom(&mut rng))
                    .collect(),
            };
            let da = U1Connection::from_fn(g, |_| {
                [normal(&mut rng), normal(&mut rng), normal(&mut rng)]
            });
            let t = 1e-5;
            let ep = energy(&st.conn.axpy(t, &da), &psi.axpy(t, &dv), eps, p).unwrap();
            let em = energy(&st.conn.axpy(-t, &da), &psi.axpy(-t, &dv), eps, p).unwrap();
            let fd = (ep - em) / (2.0 * t);
            let an = ga.inner(&da) + gp.inner(&dv);
            assert!(((fd - an) / an.abs()).abs() < 1e-6, "fd {fd} analytic {an}");
        }
    }

    #[test]
    fn exact_solution_is_stationary() {
        let c = config();
        let g = c.geometry().unwrap();
        let psi = SpinorHomField::constant(g, w1(Spinor::from_reals(1.0, 0.5, 0.0, 0.2)));
        let psi = psi.scale(1.0 / psi.norm_l4());
        let conn = U1Connection::zeros(g);
        assert!(energy(&conn, &psi, 0.5, DEFAULT_PENALTY).unwrap() < 1e-24);
        let (ga, gp) = gradient(&conn, &psi, 0.5, DEFAULT_PENALTY).unwrap();
        assert!(ga.norm_l2() < 1e-10 && gp.norm_l2() < 1e-10);
        let state = FlowState {
            conn,
            psi,
            stage: 0,
            iteration: 0,
        };
        let (report, _) = run_flow_from(&c, state, |_| Ok(())).unwrap();
        assert!(report.trace.is_empty());
        assert!(report
            .stages
            .iter()
            .all(|s| s.status == StageStatus::Converged));
        let f = report.fueter.expect("section emitted");
        assert!(f.fueter_residual < 1e-10);
    }

    #[test]
    fn energy_is_gauge_invariant() {
        let st = random_state(4);
        let g = st.psi.geom;
        let mut rng = rng_for(4, "gauge");
        let theta: Vec<f64> = (0..g.sites()).map(|_| 2.0 * normal(&mut rng)).collect();
        let (a2, p2) = gauge_transform(&theta, &st.conn, &st.psi);
        let e1 = energy(&st.conn, &st.psi, 0.4, DEFAULT_PENALTY).unwrap();
        let e2 = energy(&a2, &p2, 0.4, DEFAULT_PENALTY).unwrap();
        assert!((e1 - e2).abs() < 1e-10 * e1.max(1.0));
    }

    #[test]
    fn flow_is_monotone_and_keeps_constraint() {
        let (report, state) = run_flow(&config()).unwrap();
        assert!(!report.trace.is_empty());
        for s in &report.stages {
            let rows: Vec<&TraceRow> = report.trace.iter().filter(|r| r.stage == s.stage).collect();
            let mut prev = s.initial_energy;
            for r in rows {
                assert!(r.energy <= prev + 1e-12);
                assert!(r.l4_violation <= 1e-12);
                prev = r.energy;
            }
        }
        assert!((state.psi.norm_l4() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn flow_is_deterministic() {
        let (a, _) = run_flow(&config()).unwrap();
        let (b, _) = run_flow(&config()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn resume_reproduces_continuation() {
        let c = config();
        let mut snapshots = Vec::new();
        let (full, end) = run_flow_from(&c, initial_state(&c).unwrap(), |s| {
            snapshots.push(s.clone());
            Ok(())
        })
        .unwrap();
        let k = 7.min(snapshots.len() - 1);
        let (rest, end2) = run_flow_from(&c, snapshots[k].clone(), |_| Ok(())).unwrap();
        assert_eq!(end, end2);
        assert_eq!(full.trace[k + 1..], rest.trace[..]);
    }

    #[test]
    fn config_validation() {
        let mut c = config();
        c.epsilon_schedule = vec![0.3, 0.3];
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(m)) if m.contains("strictly")));
        let mut c = config();
        c.step = 1.0;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(m)) if m.starts_with("step")));
        let mut c = config();
        c.n = 5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_psi_has_zero_energy_but_violates_constraint() {
        let g = config().geometry().unwrap();
        let zero = SpinorHomField::zeros(g);
        let conn = U1Connection::zeros(g);
        assert_eq!(energy(&conn, &zero, 0.5, DEFAULT_PENALTY).unwrap(), 0.0);
        let r = residuals(&conn, &zero, 0.5, ResidualMode::Blowup).unwrap();
        assert_eq!(r.l4_constraint, 1.0);
    }
}
