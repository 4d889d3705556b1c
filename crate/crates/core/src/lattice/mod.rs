//! Fields on a periodic cubic lattice `(Z/n)³` with spacing `h`, and the
//! discrete operators acting on them.
//!
//! The spin^c structure, frame and determinant line are trivial on the flat
//! torus, so a spinor-hom field is a `SpinorHom` per site and a connection is a
//! real 1-form `a = (a₁, a₂, a₃)` per site.
//!
//! Parallel transport uses link variables `U_k(x) = exp(h·a_k(x)·X)` where `X`
//! is the generator of the circle action ([`circle_generator`]). The covariant
//! central difference is
//!
//! ```text
//! ∇_k f(x) = (U_k(x) f(x+e_k) − U_k(x−e_k)⁻¹ f(x−e_k)) / 2h
//! ```
//!
//! which is antisymmetric for the lattice `L²` pairing and exactly covariant
//! under `f ↦ e^{θX} f`, `a_k ↦ a_k − (θ(x+e_k) − θ(x))/h`. To first order in
//! `h` it is the central difference plus `a_k·X f`.
//!
//! The Dirac operator twists with the right Clifford module structure
//! ([`right_act`]), which commutes with `X`; this keeps `D` exactly symmetric
//! and every residual exactly gauge invariant.

pub mod checkpoint;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::ImQuaternion;
use crate::error::{Error, Result};
use crate::moduli::{
    chart_differential, chart_embed, frame_at, quotient_project_with_phase, WmuChartPoint,
};
use crate::spinor_hom::{
    circle_act, clifford_contract, moment_map, project_threehalf, right_act, MomentValue, SpinorHom,
};

/// Cubic periodic lattice with `n` sites per axis and spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub n: usize,
    pub h: f64,
}

impl LatticeGeometry {
    /// Lattice of side length `side` with `n` sites per axis.
    pub fn new(n: usize, side: f64) -> Result<Self> {
        if n < 4 || n & 1 == 1 {
            return Err(Error::InvalidGeometry(format!(
                "n must be even and at least 4, got {n}"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "side must be positive, got {side}"
            )));
        }
        Ok(Self {
            n,
            h: side / n as f64,
        })
    }

    pub fn side(&self) -> f64 {
        self.h * self.n as f64
    }

    pub fn sites(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn volume_element(&self) -> f64 {
        self.h * self.h * self.h
    }

    pub fn index(&self, x: [usize; 3]) -> usize {
        (x[0] * self.n + x[1]) * self.n + x[2]
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        [
            c[0] as f64 * self.h,
            c[1] as f64 * self.h,
            c[2] as f64 * self.h,
        ]
    }

    /// Index of `x + e_axis` (`forward`) or `x − e_axis`.
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> usize {
        let mut c = self.coords(idx);
        c[axis] = if forward {
            (c[axis] + 1) % self.n
        } else {
            (c[axis] + self.n - 1) % self.n
        };
        self.index(c)
    }

    fn ensure_same(&self, other: &LatticeGeometry) -> Result<()> {
        if self != other {
            return Err(Error::GeometryMismatch(format!(
                "n={} h={} vs n={} h={}",
                self.n, self.h, other.n, other.h
            )));
        }
        Ok(())
    }
}

/// A `SpinorHom` per lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorHomField {
    pub geom: LatticeGeometry,
    pub values: Vec<SpinorHom>,
}

impl SpinorHomField {
    pub fn zeros(geom: LatticeGeometry) -> Self {
        Self::constant(geom, SpinorHom::zero())
    }

    pub fn constant(geom: LatticeGeometry, v: SpinorHom) -> Self {
        Self {
            geom,
            values: vec![v; geom.sites()],
        }
    }

    pub fn from_fn(geom: LatticeGeometry, f: impl Fn(usize) -> SpinorHom + Sync + Send) -> Self {
        let values = (0..geom.sites()).into_par_iter().map(f).collect();
        Self { geom, values }
    }

    pub fn map(&self, f: impl Fn(&SpinorHom) -> SpinorHom + Sync + Send) -> Self {
        Self {
            geom: self.geom,
            values: self.values.par_iter().map(f).collect(),
        }
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &SpinorHomField) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| *x + y.scale(t))
            .collect();
        Self {
            geom: self.geom,
            values,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        self.map(|v| v.scale(t))
    }

    /// Lattice `L²` pairing `h³ Σ (f(x), g(x))`.
    pub fn inner(&self, other: &SpinorHomField) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.inner(y))
            .sum();
        s * self.geom.volume_element()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// `(h³ Σ |f(x)|⁴)^{1/4}`.
    pub fn norm_l4(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr().powi(2)).sum();
        (s * self.geom.volume_element()).powf(0.25)
    }

    /// Smallest sitewise norm.
    pub fn min_site_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `L²` norm of the sitewise contraction `c(f)`.
    pub fn kerc_residual(&self) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .map(|v| clifford_contract(v).norm_sqr())
            .sum();
        (s * self.geom.volume_element()).sqrt()
    }
}

/// A real 1-form: `(a₁, a₂, a₃)` per site.
#[derive(Debug, Clone, PartialEq)]
pub struct U1Connection {
    pub geom: LatticeGeometry,
    pub a: Vec<[f64; 3]>,
}

impl U1Connection {
    pub fn zeros(geom: LatticeGeometry) -> Self {
        Self {
            geom,
            a: vec![[0.0; 3]; geom.sites()],
        }
    }

    pub fn from_fn(geom: LatticeGeometry, f: impl FnMut(usize) -> [f64; 3]) -> Self {
        Self {
            geom,
            a: (0..geom.sites()).map(f).collect(),
        }
    }

    pub fn axpy(&self, t: f64, other: &U1Connection) -> Self {
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| [x[0] + t * y[0], x[1] + t * y[1], x[2] + t * y[2]])
            .collect();
        Self { geom: self.geom, a }
    }

    pub fn scale(&self, t: f64) -> Self {
        let a = self
            .a
            .iter()
            .map(|x| [t * x[0], t * x[1], t * x[2]])
            .collect();
        Self { geom: self.geom, a }
    }

    pub fn inner(&self, other: &U1Connection) -> f64 {
        let s: f64 = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
            .sum();
        s * self.geom.volume_element()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().flatten().all(|x| x.is_finite())
    }
}

/// Exact lattice differential of a function: `a_k(x) = (θ(x+e_k) − θ(x))/h`.
pub fn pure_gauge(geom: LatticeGeometry, theta: &[f64]) -> U1Connection {
    U1Connection::from_fn(geom, |i| {
        let mut v = [0.0; 3];
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = (theta[geom.neighbor(i, k, true)] - theta[i]) / geom.h;
        }
        v
    })
}

/// Gauge transformation by `θ`: `f ↦ e^{θX} f`, `a ↦ a − dθ`.
pub fn gauge_transform(
    theta: &[f64],
    conn: &U1Connection,
    f: &SpinorHomField,
) -> (U1Connection, SpinorHomField) {
    let geom = f.geom;
    let g = SpinorHomField::from_fn(geom, |i| circle_act(theta[i], &f.values[i]));
    (conn.axpy(-1.0, &pure_gauge(geom, theta)), g)
}

/// Plane wave `x ↦ e^{⟨k,x⟩X} ψ₀`. Periodic when every `k_j·side ∈ 2πZ`.
pub fn plane_wave(geom: LatticeGeometry, k: [f64; 3], psi0: &SpinorHom) -> SpinorHomField {
    SpinorHomField::from_fn(geom, |i| {
        let x = geom.position(i);
        circle_act(k[0] * x[0] + k[1] * x[1] + k[2] * x[2], psi0)
    })
}

#[inline]
fn forward_transport(h: f64, a: f64, v: &SpinorHom) -> SpinorHom {
    circle_act(h * a, v)
}

#[inline]
fn backward_transport(h: f64, a: f64, v: &SpinorHom) -> SpinorHom {
    circle_act(-h * a, v)
}

fn covariant_at(conn: &U1Connection, f: &SpinorHomField, i: usize, k: usize) -> SpinorHom {
    let g = &f.geom;
    let ip = g.neighbor(i, k, true);
    let im = g.neighbor(i, k, false);
    let fwd = forward_transport(g.h, conn.a[i][k], &f.values[ip]);
    let bwd = backward_transport(g.h, conn.a[im][k], &f.values[im]);
    (fwd - bwd).scale(0.5 / g.h)
}

/// `∇_{A,k} f` for `k = 1, 2, 3`.
pub fn covariant_derivative(
    conn: &U1Connection,
    f: &SpinorHomField,
) -> Result<[SpinorHomField; 3]> {
    conn.geom.ensure_same(&f.geom)?;
    Ok([0, 1, 2].map(|k| SpinorHomField::from_fn(f.geom, |i| covariant_at(conn, f, i, k))))
}

/// `D_A f = Σ_k e_k · ∇_{A,k} f` with the right Clifford module structure.
pub fn dirac_twisted(conn: &U1Connection, f: &SpinorHomField) -> Result<SpinorHomField> {
    conn.geom.ensure_same(&f.geom)?;
    Ok(SpinorHomField::from_fn(f.geom, |i| {
        let mut out = SpinorHom::zero();
        for k in 0..3 {
            out += right_act(ImQuaternion::basis(k), &covariant_at(conn, f, i, k));
        }
        out
    }))
}

/// `Q_A f = π ∘ D_A f` for `f` in `ker c` (checked against `tol` relative to
/// `max(1, ‖f‖)`).
pub fn rarita_schwinger(
    conn: &U1Connection,
    f: &SpinorHomField,
    tol: f64,
) -> Result<SpinorHomField> {
    let residual = f.kerc_residual();
    if residual > tol * f.norm_l2().max(1.0) {
        return Err(Error::NotThreeHalf { residual, tol });
    }
    Ok(dirac_twisted(conn, f)?.map(project_threehalf))
}

/// `π ∘ D_A ∘ π`, defined on all fields.
pub fn rarita_schwinger_sandwich(
    conn: &U1Connection,
    f: &SpinorHomField,
) -> Result<SpinorHomField> {
    let pf = f.map(project_threehalf);
    Ok(dirac_twisted(conn, &pf)?.map(project_threehalf))
}

/// Forward-difference (plaquette) curl: `(curl a)_i = ∂⁺_j a_k − ∂⁺_k a_j` for
/// cyclic `(i, j, k)`. Forward differences match the link placement of the
/// connection, so lattice pure gauges are exactly flat.
pub fn curl(geom: LatticeGeometry, v: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let inv = 1.0 / geom.h;
    (0..geom.sites())
        .map(|x| {
            let d = |comp: usize, axis: usize| {
                (v[geom.neighbor(x, axis, true)][comp] - v[x][comp]) * inv
            };
            [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
        })
        .collect()
}

/// Euclidean adjoint of [`curl`]: the same formula with `∂⁺` replaced by `−∂⁻`.
pub fn curl_adjoint(geom: LatticeGeometry, w: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let inv = 1.0 / geom.h;
    (0..geom.sites())
        .map(|x| {
            let d = |comp: usize, axis: usize| {
                (w[x][comp] - w[geom.neighbor(x, axis, false)][comp]) * inv
            };
            [d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)]
        })
        .collect()
}

/// `⋆F_A` as a vector per site.
pub fn curvature_vectors(conn: &U1Connection) -> Vec<[f64; 3]> {
    curl(conn.geom, &conn.a)
}

/// `⋆F_A` in `i·su(2)` through the Pauli identification.
pub fn curvature_star(conn: &U1Connection) -> Vec<MomentValue> {
    curvature_vectors(conn)
        .into_iter()
        .map(|v| MomentValue::from_imh(ImQuaternion::from_array(v)))
        .collect()
}

/// Which equation system the residuals refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    /// `Q_A ψ = 0`, `⋆F_A − μ(ψ) = 0`.
    Rssw,
    /// `Q_A ψ = 0`, `ε²⋆F_A − μ(ψ) = 0`, `‖ψ‖_{L⁴} = 1`.
    Blowup,
    /// `Q_A ψ = 0`, `μ(ψ) = 0`.
    Degenerate,
}

/// Residual norms of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub rs_residual: f64,
    pub curvature_residual: f64,
    pub kerc_residual: f64,
    pub l4_constraint: f64,
}

/// The sitewise curvature equation defect for `mode`.
pub fn curvature_defect(
    conn: &U1Connection,
    psi: &SpinorHomField,
    epsilon: f64,
    mode: ResidualMode,
) -> Vec<MomentValue> {
    let weight = match mode {
        ResidualMode::Rssw => 1.0,
        ResidualMode::Blowup => epsilon * epsilon,
        ResidualMode::Degenerate => 0.0,
    };
    let f = curvature_vectors(conn);
    psi.values
        .iter()
        .zip(f)
        .map(|(p, v)| {
            let fv = ImQuaternion::from_array(v).scale(weight);
            MomentValue::from_imh(fv) - moment_map(p)
        })
        .collect()
}

pub fn residuals(
    conn: &U1Connection,
    psi: &SpinorHomField,
    epsilon: f64,
    mode: ResidualMode,
) -> Result<Residuals> {
    if epsilon < 0.0 {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    conn.geom.ensure_same(&psi.geom)?;
    let vol = psi.geom.volume_element();
    let q = dirac_twisted(conn, psi)?.map(project_threehalf);
    let curv: f64 = curvature_defect(conn, psi, epsilon, mode)
        .iter()
        .map(|m| m.norm_sqr())
        .sum();
    Ok(Residuals {
        rs_residual: q.norm_l2(),
        curvature_residual: (curv * vol).sqrt(),
        kerc_residual: psi.kerc_residual(),
        l4_constraint: (psi.norm_l4() - 1.0).abs(),
    })
}

/// Lift a section of chart points to a spinor-hom field.
pub fn lift_section(geom: LatticeGeometry, phi: &[WmuChartPoint]) -> Result<SpinorHomField> {
    if phi.len() != geom.sites() {
        return Err(Error::GeometryMismatch(format!(
            "section has {} sites, lattice has {}",
            phi.len(),
            geom.sites()
        )));
    }
    let values = phi.iter().map(chart_embed).collect::<Result<Vec<_>>>()?;
    Ok(SpinorHomField { geom, values })
}

/// The lattice Fueter map `φ ↦ D_B(ψ_φ)`, `ψ_φ` the sitewise chart lift.
pub fn fueter_map(conn: &U1Connection, phi: &[WmuChartPoint]) -> Result<SpinorHomField> {
    dirac_twisted(conn, &lift_section(conn.geom, phi)?)
}

/// Linearization of [`fueter_map`] at `φ` along chart-coordinate variations
/// `δφ`: `D_B(Σ_j δφ_j ∂_j ψ)`.
pub fn fueter_linearization(
    conn: &U1Connection,
    phi: &[WmuChartPoint],
    dphi: &[[f64; 5]],
) -> Result<SpinorHomField> {
    let geom = conn.geom;
    if phi.len() != geom.sites() || dphi.len() != geom.sites() {
        return Err(Error::GeometryMismatch(
            "section length does not match lattice".into(),
        ));
    }
    let v = SpinorHomField {
        geom,
        values: phi
            .iter()
            .zip(dphi)
            .map(|(p, d)| chart_differential(p, *d))
            .collect(),
    };
    dirac_twisted(conn, &v)
}

/// `L²` norm of the Fueter map projected sitewise onto `T′`.
pub fn fueter_residual(conn: &U1Connection, phi: &[WmuChartPoint]) -> Result<f64> {
    let f = fueter_map(conn, phi)?;
    let mut acc = 0.0;
    for (p, v) in phi.iter().zip(&f.values) {
        let basis = frame_at(p)?.t_prime_basis();
        acc += basis.iter().map(|t| v.inner(t).powi(2)).sum::<f64>();
    }
    Ok((acc * conn.geom.volume_element()).sqrt())
}

fn wrap_angle(x: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    x - two_pi * (x / two_pi).round()
}

/// Forward direction: from a configuration `(A, ψ)` with `ψ` sitewise on
/// `W^μ` (within `tol`) to the induced section `φ = [ψ]` and the connection
/// `B` in the gauge where `ψ` is the chart lift of `φ`. Phase jumps between
/// neighbors are wrapped into `(−π, π]` so that link variables are unchanged.
pub fn haydys_forward(
    conn: &U1Connection,
    psi: &SpinorHomField,
    tol: f64,
) -> Result<(U1Connection, Vec<WmuChartPoint>)> {
    conn.geom.ensure_same(&psi.geom)?;
    let geom = psi.geom;
    let projected = psi
        .values
        .iter()
        .map(|v| quotient_project_with_phase(v, tol))
        .collect::<Result<Vec<_>>>()?;
    let theta: Vec<f64> = projected.iter().map(|(_, t)| *t).collect();
    let b = U1Connection::from_fn(geom, |i| {
        let mut v = conn.a[i];
        for (k, vk) in v.iter_mut().enumerate() {
            *vk -= wrap_angle(theta[geom.neighbor(i, k, true)] - theta[i]) / geom.h;
        }
        v
    });
    Ok((b, projected.into_iter().map(|(p, _)| p).collect()))
}

/// Backward direction: lift a section to `(A, ψ)` with `A = B` and `ψ` the
/// chart lift rescaled to unit `L⁴` norm.
pub fn haydys_backward(
    conn: &U1Connection,
    phi: &[WmuChartPoint],
) -> Result<(U1Connection, SpinorHomField)> {
    let lift = lift_section(conn.geom, phi)?;
    let n4 = lift.norm_l4();
    Ok((conn.clone(), lift.scale(1.0 / n4)))
}
