//! The aquaternionic moduli: `W^μ = ker c ∩ μ⁻¹(0) \ {0}` and its circle
//! quotient `W₀`.
//!
//! `W = ker c` splits as `W₁ ⊕ W₂` with
//! `W₁(s) = I*⊗Is − J*⊗Js` and `W₂(s) = I*⊗Is − K*⊗Ks`. On `W`, `μ = 0` forces
//! `s₂ = −λ i s₁` (or symmetrically `s₁ = −κ i s₂`), which gives two charts with
//! coordinates `(a, b, c, d, λ)`. Inside a chart `ψ` is linear in `(a, b, c, d)`,
//! so the coordinate frame is obtained by evaluating the chart at basis vectors.

use nalgebra::{Matrix3x4, Matrix4};
use serde::{Deserialize, Serialize};

use crate::clifford::{clifford_act, ImQuaternion, Spinor, C64};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, reject, singular_values_rows};
use crate::spinor_hom::{
    circle_act, circle_generator, clifford_contract, hk_apply, hk_combination, iota, moment_map,
    Axis, SpinorHom,
};

const I_UNIT: C64 = C64::new(0.0, 1.0);

/// Which of the two spinors carries the free coordinates `(a, b, c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartTag {
    Psi1Dominant,
    Psi2Dominant,
}

/// Local coordinates on `W^μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WmuChartPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: f64,
    pub chart: ChartTag,
}

impl WmuChartPoint {
    pub fn new(a: f64, b: f64, c: f64, d: f64, lambda: f64, chart: ChartTag) -> Self {
        Self {
            a,
            b,
            c,
            d,
            lambda,
            chart,
        }
    }

    pub fn psi1(a: f64, b: f64, c: f64, d: f64, lambda: f64) -> Self {
        Self::new(a, b, c, d, lambda, ChartTag::Psi1Dominant)
    }

    /// The free spinor `a + bi, c + di`.
    pub fn spinor(&self) -> Spinor {
        Spinor::from_reals(self.a, self.b, self.c, self.d)
    }

    /// `a² + b² + c² + d²`.
    pub fn r2(&self) -> f64 {
        self.spinor().norm_sqr()
    }

    pub fn coords(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.lambda]
    }

    pub fn with_coords(&self, v: [f64; 5]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4], self.chart)
    }

    fn check(&self) -> Result<()> {
        if self.r2() == 0.0 {
            return Err(Error::DegenerateChart);
        }
        Ok(())
    }
}

/// Frame data at a point of `W^μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBundle {
    pub d_a: SpinorHom,
    pub d_b: SpinorHom,
    pub d_c: SpinorHom,
    pub d_d: SpinorHom,
    pub d_lambda: SpinorHom,
    pub killing: SpinorHom,
    pub n: SpinorHom,
    pub i_n: SpinorHom,
    pub j_n: SpinorHom,
    pub k_n: SpinorHom,
    pub d_lambda_tilde: SpinorHom,
}

impl FrameBundle {
    /// `(∂a, ∂b, ∂c, ∂d, ∂λ)`.
    pub fn tangent(&self) -> [SpinorHom; 5] {
        [self.d_a, self.d_b, self.d_c, self.d_d, self.d_lambda]
    }

    /// `(N, IN, JN, KN)`.
    pub fn normal(&self) -> [SpinorHom; 4] {
        [self.n, self.i_n, self.j_n, self.k_n]
    }

    /// Orthonormal basis of `T′ = IN ⊕ JN ⊕ KN ⊕ span{∂̃λ}`.
    pub fn t_prime_basis(&self) -> Vec<SpinorHom> {
        gram_schmidt(&[self.i_n, self.j_n, self.k_n, self.d_lambda_tilde], 1e-12)
    }
}

/// A 4×4 real matrix together with its determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolMatrix {
    pub m: Matrix4<f64>,
    pub det: f64,
}

impl SymbolMatrix {
    pub fn new(m: Matrix4<f64>) -> Self {
        Self {
            m,
            det: m.determinant(),
        }
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| self.m[(i, j)]).collect())
            .collect();
        singular_values_rows(&rows)
    }
}

/// `W₁(s) = I*⊗Is − J*⊗Js`.
pub fn w1(s: Spinor) -> SpinorHom {
    SpinorHom::from_columns([
        clifford_act(ImQuaternion::I, s),
        -clifford_act(ImQuaternion::J, s),
        Spinor::ZERO,
    ])
}

/// `W₂(s) = I*⊗Is − K*⊗Ks`.
pub fn w2(s: Spinor) -> SpinorHom {
    SpinorHom::from_columns([
        clifford_act(ImQuaternion::I, s),
        Spinor::ZERO,
        -clifford_act(ImQuaternion::K, s),
    ])
}

pub fn w_assemble(s1: Spinor, s2: Spinor) -> SpinorHom {
    w1(s1) + w2(s2)
}

/// Inverse of [`w_assemble`] on `W`. The `J` column determines `s₁`, the `K`
/// column determines `s₂`.
pub fn w_split(psi: &SpinorHom, tol: f64) -> Result<(Spinor, Spinor)> {
    let residual = clifford_contract(psi).norm();
    if residual > tol * psi.norm().max(1.0) {
        return Err(Error::NotThreeHalf { residual, tol });
    }
    let s1 = clifford_act(ImQuaternion::J, psi.column(1));
    let s2 = clifford_act(ImQuaternion::K, psi.column(2));
    Ok((s1, s2))
}

/// `−i s`, the spinor whose real coordinates are `(b, −a, d, −c)`.
fn minus_i(s: Spinor) -> Spinor {
    s.cmul(-I_UNIT)
}

/// Coefficients of the real bilinear system `μ(W₁(s₁) + W₂(s₂)) = 0` in the
/// unknowns `(a₂, b₂, c₂, d₂)`, for fixed `s₁ = (a₁ + b₁i, c₁ + d₁i)`.
pub fn mu_kernel_matrix(s1: Spinor) -> Matrix3x4<f64> {
    let [a, b, c, d] = s1.to_reals();
    Matrix3x4::new(
        a, b, -c, -d, //
        c, d, a, b, //
        d, -c, -b, a,
    )
}

/// The kernel direction of [`mu_kernel_matrix`]: `(b₁, −a₁, d₁, −c₁)`.
pub fn mu_kernel_vector(s1: Spinor) -> [f64; 4] {
    minus_i(s1).to_reals()
}

/// The point of `W^μ` with chart coordinates `p`.
pub fn chart_embed(p: &WmuChartPoint) -> Result<SpinorHom> {
    p.check()?;
    Ok(chart_linear(p.spinor(), p.lambda, p.chart))
}

fn chart_linear(s: Spinor, lambda: f64, chart: ChartTag) -> SpinorHom {
    let t = minus_i(s).scale(lambda);
    match chart {
        ChartTag::Psi1Dominant => w_assemble(s, t),
        ChartTag::Psi2Dominant => w_assemble(t, s),
    }
}

/// Coordinate derivative of [`chart_embed`] along `v = (δa, δb, δc, δd, δλ)`.
pub fn chart_differential(p: &WmuChartPoint, v: [f64; 5]) -> SpinorHom {
    let ds = Spinor::from_reals(v[0], v[1], v[2], v[3]);
    let lin = chart_linear(ds, p.lambda, p.chart);
    let free = minus_i(p.spinor()).scale(v[4]);
    let dl = match p.chart {
        ChartTag::Psi1Dominant => w2(free),
        ChartTag::Psi2Dominant => w1(free),
    };
    lin + dl
}

/// Chart coordinates of `ψ ∈ W^μ` without gauge fixing. Chooses the chart by
/// `|s₁| ≥ |s₂|`.
pub fn chart_coordinates(psi: &SpinorHom, tol: f64) -> Result<WmuChartPoint> {
    let (s1, s2) = w_split(psi, tol)?;
    let (n1, n2) = (s1.norm_sqr(), s2.norm_sqr());
    if n1 == 0.0 && n2 == 0.0 {
        return Err(Error::ZeroInput);
    }
    let (free, other, chart) = if n1 >= n2 {
        (s1, s2, ChartTag::Psi1Dominant)
    } else {
        (s2, s1, ChartTag::Psi2Dominant)
    };
    let lambda = other.dot(minus_i(free)) / free.norm_sqr();
    let [a, b, c, d] = free.to_reals();
    Ok(WmuChartPoint::new(a, b, c, d, lambda, chart))
}

/// Gauge-fixed representative of the circle orbit of `ψ ∈ W^μ`, together
/// with the angle `θ` such that `circle_act(θ, ψ)` is that representative.
///
/// The gauge fix rotates the dominant spinor so that its larger-modulus
/// component (first one on ties) is real and positive.
pub fn quotient_project_with_phase(psi: &SpinorHom, tol: f64) -> Result<(WmuChartPoint, f64)> {
    let scale = psi.norm();
    if scale == 0.0 {
        return Err(Error::ZeroInput);
    }
    let mu = moment_map(psi).norm();
    let contract = clifford_contract(psi).norm();
    if mu > tol * scale * scale || contract > tol * scale {
        return Err(Error::OffWmu { mu, contract, tol });
    }
    let raw = chart_coordinates(psi, tol)?;
    let s = raw.spinor();
    let z = if s.s0.norm() >= s.s1.norm() {
        s.s0
    } else {
        s.s1
    };
    let theta = -z.arg();
    let fixed = chart_coordinates(&circle_act(theta, psi), tol)?;
    Ok((fixed, theta))
}

pub fn quotient_project(psi: &SpinorHom, tol: f64) -> Result<WmuChartPoint> {
    quotient_project_with_phase(psi, tol).map(|(p, _)| p)
}

/// All frame vectors at a chart point.
pub fn frame_at(p: &WmuChartPoint) -> Result<FrameBundle> {
    p.check()?;
    let psi = chart_linear(p.spinor(), p.lambda, p.chart);
    let e = |k: usize| {
        let mut v = [0.0; 5];
        v[k] = 1.0;
        chart_differential(p, v)
    };
    let (d_a, d_b, d_c, d_d, d_lambda) = (e(0), e(1), e(2), e(3), e(4));
    let killing = circle_generator(&psi);
    let n = iota(normal_spinor(p));
    let tangent4 = [d_a, d_b, d_c, d_d];
    let ortho: Vec<SpinorHom> = tangent4.iter().map(|v| v.scale(1.0 / v.norm())).collect();
    let d_lambda_tilde = reject(&d_lambda, &ortho);
    Ok(FrameBundle {
        d_a,
        d_b,
        d_c,
        d_d,
        d_lambda,
        killing,
        n,
        i_n: hk_apply(Axis::I, &n),
        j_n: hk_apply(Axis::J, &n),
        k_n: hk_apply(Axis::K, &n),
        d_lambda_tilde,
    })
}

/// The spinor `s` with `N = span ι(s)`: real coordinates
/// `(−b + λa, a + λb, −d + λc, c + λd)`, i.e. `s = (i + λ)(a + bi, c + di)`.
pub fn normal_spinor(p: &WmuChartPoint) -> Spinor {
    p.spinor().cmul(C64::new(p.lambda, 1.0))
}

/// Coefficients of the system `dμ_ψ(ι(s)) = 0` in the unknown `s`, in chart
/// coordinates. Its rows are mutually orthogonal with equal norms and its kernel
/// is spanned by [`normal_spinor`].
pub fn normal_kernel_matrix(p: &WmuChartPoint) -> Matrix3x4<f64> {
    let (a, b, c, d, l) = (p.a, p.b, p.c, p.d, p.lambda);
    Matrix3x4::new(
        a + l * b,
        b - l * a,
        -c - l * d,
        -d + l * c, //
        c + l * d,
        d - l * c,
        a + l * b,
        b - l * a, //
        d - l * c,
        -c - l * d,
        -b + l * a,
        a + l * b,
    )
}

/// Matrix of Clifford multiplication by `ξ` (through the hyperkähler triple)
/// from the orthonormalized `span{∂a, ∂b, ∂c, ∂d}` to the orthonormalized `T′`.
/// Entry `(r, c)` is `(γ(ξ)·u_c, t_r)`.
pub fn symbol_matrix(p: &WmuChartPoint, xi: ImQuaternion) -> Result<SymbolMatrix> {
    let f = frame_at(p)?;
    let dom: Vec<SpinorHom> = [f.d_a, f.d_b, f.d_c, f.d_d]
        .iter()
        .map(|v| v.scale(1.0 / v.norm()))
        .collect();
    let tgt = f.t_prime_basis();
    let mut m = Matrix4::zeros();
    for (c, u) in dom.iter().enumerate() {
        let g = hk_combination(xi, u);
        for (r, t) in tgt.iter().enumerate() {
            m[(r, c)] = g.inner(t);
        }
    }
    Ok(SymbolMatrix::new(m))
}

/// The explicit 4×4 matrix of the restricted symbol in chart coordinates, in
/// the un-normalized frames `(IN, JN, KN, ∂̃λ)` against `(a, b, c, d)`.
pub fn symbol_regression_matrix(p: &WmuChartPoint) -> SymbolMatrix {
    let (a, b, c, d, l) = (p.a, p.b, p.c, p.d, p.lambda);
    let l2 = l * l;
    let u = 2.0 * (l2 + 1.0);
    let v = 2.0 * (2.0 * l2 + 1.0);
    let w = 2.0 * (l2 + 2.0);
    let m = Matrix4::new(
        -u * b,
        u * a,
        -u * d,
        u * c, //
        v * c - 2.0 * l * d,
        -v * d - 2.0 * l * c,
        -v * a + 2.0 * l * b,
        v * b + 2.0 * l * a, //
        -w * d + 2.0 * l * c,
        -w * c - 2.0 * l * d,
        w * b - 2.0 * l * a,
        w * a + 2.0 * l * b, //
        a,
        b,
        c,
        d,
    );
    SymbolMatrix::new(m)
}

/// Point-dependent positive factor relating the determinant of
/// [`symbol_regression_matrix`] to [`symbol_det_closed_form`]: `8(1 + λ²)`.
pub fn symbol_normalization(p: &WmuChartPoint) -> f64 {
    8.0 * (1.0 + p.lambda * p.lambda)
}

/// `2(a² + b² + c² + d²)²(1 + λ²)²`.
pub fn symbol_det_closed_form(p: &WmuChartPoint) -> f64 {
    let r2 = p.r2();
    let q = 1.0 + p.lambda * p.lambda;
    2.0 * r2 * r2 * q * q
}
