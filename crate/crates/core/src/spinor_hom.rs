//! The space `S = Hom(C ⊗ Im H, H)` realized as 2×3 complex matrices.
//!
//! Column `k` is `ψ(e_k)` for `e = (I, J, K)`; rows are the two spinor
//! components. The real inner product is `(A, B) = ½ Re tr(A B*)`.
//!
//! Two `U(1)`-type actions appear and must not be confused:
//!
//! * the scalar phase `ψ ↦ e^{iθ}ψ` ([`phase`]), which preserves `μ` but not `ker c`;
//! * the circle action `ψ ↦ ψ · diag(e^{iθ}, e^{-iθ}, e^{-iθ})` ([`circle_act`]),
//!   which preserves `ker c`, `ι(H)` and `μ`. Its generator is the rotation field
//!   tangent to `W^μ`, so gauge transformations and the quotient `W^μ → W₀` use it.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix2x3};

use crate::clifford::{clifford_act, right_clifford_act, ImQuaternion, Spinor, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const IM: C64 = C64::new(0.0, 1.0);

/// A point of `S`, stored as a 2×3 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorHom {
    pub m: Matrix2x3<C64>,
}

impl Default for SpinorHom {
    fn default() -> Self {
        Self::zero()
    }
}

impl SpinorHom {
    pub fn zero() -> Self {
        Self {
            m: Matrix2x3::from_element(ZERO),
        }
    }

    pub fn from_columns(cols: [Spinor; 3]) -> Self {
        let mut m = Matrix2x3::from_element(ZERO);
        for (k, s) in cols.iter().enumerate() {
            m[(0, k)] = s.s0;
            m[(1, k)] = s.s1;
        }
        Self { m }
    }

    /// Build from rows, each row listing the entries under `I`, `J`, `K`.
    pub fn from_rows(r0: [C64; 3], r1: [C64; 3]) -> Self {
        Self {
            m: Matrix2x3::new(r0[0], r0[1], r0[2], r1[0], r1[1], r1[2]),
        }
    }

    pub fn column(&self, k: usize) -> Spinor {
        Spinor::new(self.m[(0, k)], self.m[(1, k)])
    }

    pub fn columns(&self) -> [Spinor; 3] {
        [self.column(0), self.column(1), self.column(2)]
    }

    pub fn map_columns(&self, f: impl Fn(usize, Spinor) -> Spinor) -> Self {
        let c = self.columns();
        Self::from_columns([f(0, c[0]), f(1, c[1]), f(2, c[2])])
    }

    /// `(A, B) = ½ Re tr(A B*)`.
    pub fn inner(&self, other: &SpinorHom) -> f64 {
        let mut acc = 0.0;
        for (x, y) in self.m.iter().zip(other.m.iter()) {
            acc += x.re * y.re + x.im * y.im;
        }
        0.5 * acc
    }

    /// Hermitian pairing `½ tr(A B*)`.
    pub fn hermitian(&self, other: &SpinorHom) -> C64 {
        let mut acc = ZERO;
        for (x, y) in self.m.iter().zip(other.m.iter()) {
            acc += x * y.conj();
        }
        acc * 0.5
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Sum of squared moduli of all entries, `= 2·norm_sqr()`; this is `tr(ψψ*)`.
    pub fn frobenius_sqr(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            m: self.m * C64::new(t, 0.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Real coordinates, column-major: for each column, `(re s0, im s0, re s1, im s1)`.
    pub fn to_reals(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for k in 0..3 {
            let r = self.column(k).to_reals();
            out[4 * k..4 * k + 4].copy_from_slice(&r);
        }
        out
    }

    pub fn from_reals(v: &[f64]) -> Self {
        assert_eq!(v.len(), 12, "expected 12 real coordinates");
        Self::from_columns([
            Spinor::from_reals(v[0], v[1], v[2], v[3]),
            Spinor::from_reals(v[4], v[5], v[6], v[7]),
            Spinor::from_reals(v[8], v[9], v[10], v[11]),
        ])
    }

    /// The standard real basis matching [`SpinorHom::to_reals`].
    pub fn real_basis(k: usize) -> Self {
        let mut v = [0.0; 12];
        v[k] = 1.0;
        Self::from_reals(&v)
    }
}

impl Add for SpinorHom {
    type Output = SpinorHom;
    fn add(self, rhs: SpinorHom) -> SpinorHom {
        SpinorHom { m: self.m + rhs.m }
    }
}

impl AddAssign for SpinorHom {
    fn add_assign(&mut self, rhs: SpinorHom) {
        self.m += rhs.m;
    }
}

impl Sub for SpinorHom {
    type Output = SpinorHom;
    fn sub(self, rhs: SpinorHom) -> SpinorHom {
        SpinorHom { m: self.m - rhs.m }
    }
}

impl Neg for SpinorHom {
    type Output = SpinorHom;
    fn neg(self) -> SpinorHom {
        SpinorHom { m: -self.m }
    }
}

impl Mul<f64> for SpinorHom {
    type Output = SpinorHom;
    fn mul(self, t: f64) -> SpinorHom {
        self.scale(t)
    }
}

/// An element of `i·su(2)`: a traceless hermitian 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentValue {
    pub v: Matrix2<C64>,
}

impl Default for MomentValue {
    fn default() -> Self {
        Self::zero()
    }
}

impl MomentValue {
    pub fn zero() -> Self {
        Self {
            v: Matrix2::from_element(ZERO),
        }
    }

    /// `x σ₁ + y σ₂ + z σ₃` with the Pauli matrices. An isometry from `Im H`
    /// (euclidean) onto `i·su(2)` with `(A, B) = ½ Re tr(A B*)`.
    pub fn from_imh(v: ImQuaternion) -> Self {
        Self {
            v: Matrix2::new(
                C64::new(v.z, 0.0),
                C64::new(v.x, -v.y),
                C64::new(v.x, v.y),
                C64::new(-v.z, 0.0),
            ),
        }
    }

    /// Inverse of [`MomentValue::from_imh`] on traceless hermitian matrices;
    /// on general input it is the adjoint `C ↦ (½ Re tr(σ_k C))_k`.
    pub fn to_imh(&self) -> ImQuaternion {
        let v = &self.v;
        ImQuaternion::new(
            0.5 * (v[(0, 1)].re + v[(1, 0)].re),
            0.5 * (v[(1, 0)].im - v[(0, 1)].im),
            0.5 * (v[(0, 0)].re - v[(1, 1)].re),
        )
    }

    pub fn trace(&self) -> C64 {
        self.v[(0, 0)] + self.v[(1, 1)]
    }

    /// Largest entry of `v - v*`.
    pub fn hermitian_defect(&self) -> f64 {
        (self.v - self.v.adjoint())
            .iter()
            .fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn inner(&self, other: &MomentValue) -> f64 {
        let mut acc = 0.0;
        for (x, y) in self.v.iter().zip(other.v.iter()) {
            acc += x.re * y.re + x.im * y.im;
        }
        0.5 * acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            v: self.v * C64::new(t, 0.0),
        }
    }
}

impl Add for MomentValue {
    type Output = MomentValue;
    fn add(self, rhs: MomentValue) -> MomentValue {
        MomentValue { v: self.v + rhs.v }
    }
}

impl Sub for MomentValue {
    type Output = MomentValue;
    fn sub(self, rhs: MomentValue) -> MomentValue {
        MomentValue { v: self.v - rhs.v }
    }
}

/// One of the three hyperkähler axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    I,
    J,
    K,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::I, Axis::J, Axis::K];

    pub fn index(self) -> usize {
        match self {
            Axis::I => 0,
            Axis::J => 1,
            Axis::K => 2,
        }
    }

    pub fn unit(self) -> ImQuaternion {
        ImQuaternion::basis(self.index())
    }
}

/// `c(ψ) = Σ_e e · ψ(e)`.
pub fn clifford_contract(psi: &SpinorHom) -> Spinor {
    let mut out = Spinor::ZERO;
    for k in 0..3 {
        out += clifford_act(ImQuaternion::basis(k), psi.column(k));
    }
    out
}

/// `ι(s) = I*⊗Is + J*⊗Js + K*⊗Ks`. With the conventions here `|ι(s)|² = (3/2)|s|²`
/// and `c ∘ ι = -3`.
pub fn iota(s: Spinor) -> SpinorHom {
    SpinorHom::from_columns([
        clifford_act(ImQuaternion::I, s),
        clifford_act(ImQuaternion::J, s),
        clifford_act(ImQuaternion::K, s),
    ])
}

/// The spinor `s` with `ψ - ι(s) ∈ ker c`, i.e. `s = -c(ψ)/3`.
pub fn iota_component(psi: &SpinorHom) -> Spinor {
    clifford_contract(psi).scale(-1.0 / 3.0)
}

/// Adjoint of `c` for `(·,·)` on `S` and the euclidean norm on spinors: `cᵀ = -2ι`.
pub fn contract_adjoint(s: Spinor) -> SpinorHom {
    iota(s).scale(-2.0)
}

/// Orthogonal projection onto `W = ker c`: `π = id + ⅓ ι ∘ c`.
pub fn project_threehalf(psi: &SpinorHom) -> SpinorHom {
    *psi - iota(iota_component(psi))
}

/// The hyperkähler structure along `axis`: left multiplication on every column.
pub fn hk_apply(axis: Axis, psi: &SpinorHom) -> SpinorHom {
    let u = axis.unit();
    psi.map_columns(|_, s| clifford_act(u, s))
}

/// `v₁ I_S + v₂ J_S + v₃ K_S` applied to `ψ`.
pub fn hk_combination(v: ImQuaternion, psi: &SpinorHom) -> SpinorHom {
    psi.map_columns(|_, s| clifford_act(v, s))
}

/// Right multiplication by `v` on every column. This is the Clifford module
/// structure used by the lattice Dirac operator; it commutes with
/// [`hk_apply`] and with [`circle_act`].
pub fn right_act(v: ImQuaternion, psi: &SpinorHom) -> SpinorHom {
    psi.map_columns(|_, s| right_clifford_act(v, s))
}

/// `μ(ψ) = ψψ* - ½ tr(ψψ*) id`.
pub fn moment_map(psi: &SpinorHom) -> MomentValue {
    let p = psi.m * psi.m.adjoint();
    let half_tr = (p[(0, 0)] + p[(1, 1)]) * 0.5;
    MomentValue {
        v: p - Matrix2::identity() * half_tr,
    }
}

/// `dμ_ψ(h) = ψh* + hψ* - ½ tr(ψh* + hψ*) id`.
pub fn moment_diff(psi: &SpinorHom, h: &SpinorHom) -> MomentValue {
    let p = psi.m * h.m.adjoint() + h.m * psi.m.adjoint();
    let half_tr = (p[(0, 0)] + p[(1, 1)]) * 0.5;
    MomentValue {
        v: p - Matrix2::identity() * half_tr,
    }
}

/// Adjoint of `h ↦ dμ_ψ(h)` applied to a traceless hermitian `C`: `2Cψ`.
pub fn moment_diff_adjoint(psi: &SpinorHom, c: &MomentValue) -> SpinorHom {
    SpinorHom {
        m: c.v * psi.m * C64::new(2.0, 0.0),
    }
}

/// Scalar phase `e^{iθ}ψ`.
pub fn phase(theta: f64, psi: &SpinorHom) -> SpinorHom {
    SpinorHom {
        m: psi.m * C64::from_polar(1.0, theta),
    }
}

/// Circle action `ψ · diag(e^{iθ}, e^{-iθ}, e^{-iθ})`.
pub fn circle_act(theta: f64, psi: &SpinorHom) -> SpinorHom {
    let u = C64::from_polar(1.0, theta);
    let w = u.conj();
    let mut m = psi.m;
    for r in 0..2 {
        m[(r, 0)] *= u;
        m[(r, 1)] *= w;
        m[(r, 2)] *= w;
    }
    SpinorHom { m }
}

/// Generator of [`circle_act`]: `ψ · diag(i, -i, -i)`. Squares to `-id`.
pub fn circle_generator(psi: &SpinorHom) -> SpinorHom {
    let mut m = psi.m;
    for r in 0..2 {
        m[(r, 0)] *= IM;
        m[(r, 1)] *= -IM;
        m[(r, 2)] *= -IM;
    }
    SpinorHom { m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_spinor, gaussian_spinor_hom, rng_for};
    use rand::Rng;

    fn w1(s: Spinor) -> SpinorHom {
        SpinorHom::from_columns([
            clifford_act(ImQuaternion::I, s),
            -clifford_act(ImQuaternion::J, s),
            Spinor::ZERO,
        ])
    }

    #[test]
    fn contract_of_iota_is_minus_three() {
        let mut rng = rng_for(1, "contract_iota");
        for _ in 0..100 {
            let s = gaussian_spinor(&mut rng);
            let t = clifford_contract(&iota(s));
            assert!((t + s.scale(3.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn iota_norm_is_three_halves() {
        let mut rng = rng_for(1, "iota_norm");
        let s = gaussian_spinor(&mut rng);
        assert!((iota(s).norm_sqr() - 1.5 * s.norm_sqr()).abs() < 1e-13);
    }

    #[test]
    fn iota_matrix_form() {
        let (a, b, c, d) = (0.7, -1.1, 0.4, 2.3);
        let m = iota(Spinor::from_reals(a, b, c, d));
        let expect = SpinorHom::from_rows(
            [C64::new(-b, a), C64::new(-c, d), C64::new(-d, -c)],
            [C64::new(-d, c), C64::new(a, -b), C64::new(b, a)],
        );
        assert!((m - expect).max_abs() < 1e-15);
    }

    #[test]
    fn w1_is_in_kernel_and_has_zero_moment() {
        let mut rng = rng_for(2, "w1");
        for _ in 0..100 {
            let psi = w1(gaussian_spinor(&mut rng));
            assert!(clifford_contract(&psi).norm() < 1e-13);
            assert!(moment_map(&psi).max_abs() < 1e-13);
        }
    }

    #[test]
    fn projector_properties() {
        let mut rng = rng_for(3, "projector");
        for _ in 0..50 {
            let psi = gaussian_spinor_hom(&mut rng);
            let phi = gaussian_spinor_hom(&mut rng);
            let p = project_threehalf(&psi);
            assert!(clifford_contract(&p).norm() < 1e-13);
            assert!((project_threehalf(&p) - p).max_abs() < 1e-13);
            let lhs = project_threehalf(&psi).inner(&phi);
            let rhs = psi.inner(&project_threehalf(&phi));
            assert!((lhs - rhs).abs() < 1e-12);
            let s = gaussian_spinor(&mut rng);
            assert!(project_threehalf(&iota(s)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn contract_adjoint_matches_pairing() {
        let mut rng = rng_for(4, "cadj");
        let psi = gaussian_spinor_hom(&mut rng);
        let s = gaussian_spinor(&mut rng);
        let lhs = clifford_contract(&psi).dot(s);
        let rhs = psi.inner(&contract_adjoint(s));
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn hk_quaternion_relations() {
        let mut rng = rng_for(5, "hk");
        let psi = gaussian_spinor_hom(&mut rng);
        let ii = hk_apply(Axis::I, &hk_apply(Axis::I, &psi));
        assert!((ii + psi).max_abs() < 1e-14);
        let ij = hk_apply(Axis::I, &hk_apply(Axis::J, &psi));
        assert!((ij - hk_apply(Axis::K, &psi)).max_abs() < 1e-14);
        let ijk = hk_apply(Axis::I, &hk_apply(Axis::J, &hk_apply(Axis::K, &psi)));
        assert!((ijk + psi).max_abs() < 1e-14);
        for ax in Axis::ALL {
            assert!(hk_apply(ax, &psi).inner(&psi).abs() < 1e-13);
            assert!((hk_apply(ax, &psi).norm() - psi.norm()).abs() < 1e-13);
        }
    }

    #[test]
    fn moment_is_traceless_hermitian_and_quadratic() {
        let mut rng = rng_for(6, "moment");
        let psi = gaussian_spinor_hom(&mut rng);
        let mu = moment_map(&psi);
        assert!(mu.trace().norm() < 1e-13);
        assert!(mu.hermitian_defect() < 1e-13);
        let t: f64 = rng.random_range(0.1..3.0);
        assert!((moment_map(&psi.scale(t)) - mu.scale(t * t)).max_abs() < 1e-12);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        assert!((moment_map(&phase(theta, &psi)) - mu).max_abs() < 1e-12);
        assert!((moment_map(&circle_act(theta, &psi)) - mu).max_abs() < 1e-12);
    }

    #[test]
    fn moment_diff_matches_central_difference() {
        let mut rng = rng_for(7, "dmu");
        let psi = gaussian_spinor_hom(&mut rng);
        let h = gaussian_spinor_hom(&mut rng);
        let eps = 1e-5;
        let fd = (moment_map(&(psi + h.scale(eps))) - moment_map(&(psi - h.scale(eps))))
            .scale(0.5 / eps);
        assert!((fd - moment_diff(&psi, &h)).max_abs() < 1e-8);
        assert!(moment_diff(&psi, &phase(std::f64::consts::FRAC_PI_2, &psi)).max_abs() < 1e-13);
    }

    #[test]
    fn moment_diff_adjoint_is_two_c_psi() {
        let mut rng = rng_for(8, "dmu_adj");
        let psi = gaussian_spinor_hom(&mut rng);
        let h = gaussian_spinor_hom(&mut rng);
        let c = MomentValue::from_imh(ImQuaternion::new(0.3, -1.2, 0.8));
        let lhs = moment_diff(&psi, &h).inner(&c);
        let rhs = h.inner(&moment_diff_adjoint(&psi, &c));
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn pauli_identification_is_isometric() {
        let v = ImQuaternion::new(0.3, -1.2, 0.8);
        let w = ImQuaternion::new(-2.0, 0.5, 1.5);
        let (mv, mw) = (MomentValue::from_imh(v), MomentValue::from_imh(w));
        let dot = v.x * w.x + v.y * w.y + v.z * w.z;
        assert!((mv.inner(&mw) - dot).abs() < 1e-14);
        assert_eq!(mv.to_imh(), v);
    }

    #[test]
    fn circle_action_preserves_kernel_and_iota_image() {
        let mut rng = rng_for(9, "circle");
        let psi = project_threehalf(&gaussian_spinor_hom(&mut rng));
        let s = gaussian_spinor(&mut rng);
        let g = circle_act(0.9, &psi);
        assert!(clifford_contract(&g).norm() < 1e-13);
        let gi = circle_act(0.9, &iota(s));
        assert!(project_threehalf(&gi).max_abs() < 1e-13);
        let gen = circle_generator(&psi);
        assert!((circle_generator(&gen) + psi).max_abs() < 1e-14);
    }

    #[test]
    fn right_action_commutes_with_circle_and_hk() {
        let mut rng = rng_for(10, "right");
        let psi = gaussian_spinor_hom(&mut rng);
        let v = ImQuaternion::new(0.2, -0.4, 1.1);
        let a = right_act(v, &circle_act(0.4, &psi));
        let b = circle_act(0.4, &right_act(v, &psi));
        assert!((a - b).max_abs() < 1e-14);
        let c = right_act(v, &hk_apply(Axis::J, &psi));
        let d = hk_apply(Axis::J, &right_act(v, &psi));
        assert!((c - d).max_abs() < 1e-14);
    }
}
