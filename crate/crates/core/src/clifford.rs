//! Quaternions, imaginary quaternions, two-component spinors and the
//! Clifford action of `Cl(3)` on spinors.
//!
//! Conventions fixed here are used by every other module:
//!
//! * `I² = J² = K² = IJK = -1` (Hamilton).
//! * A quaternion `a + bI + cJ + dK` is identified with the spinor
//!   `(a + bi, c + di)`, i.e. `q = z₀ + z₁·J` with `z₀, z₁ ∈ span{1, I}`.
//!   Under this identification the complex unit is left multiplication by `I`.
//! * The Clifford action of `v ∈ Im H` on a spinor is left quaternion
//!   multiplication. It is real-linear; it is complex-linear only for `v ∝ I`
//!   (left multiplication by `J`, `K` is conjugate-linear on `C²`).
//! * [`right_clifford_act`] is the commuting Clifford module structure given by
//!   right multiplication. It is complex-linear and is what the lattice
//!   operators twist with.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// A real quaternion `w + xI + yJ + zK`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, t: f64) -> Self {
        Self::new(self.w * t, self.x * t, self.y * t, self.z * t)
    }

    /// Imaginary part.
    pub fn im(self) -> ImQuaternion {
        ImQuaternion::new(self.x, self.y, self.z)
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        quat_mul(self, rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w + rhs.w,
            self.x + rhs.x,
            self.y + rhs.y,
            self.z + rhs.z,
        )
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w - rhs.w,
            self.x - rhs.x,
            self.y - rhs.y,
            self.z - rhs.z,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// A pure imaginary quaternion `xI + yJ + zK`. Also used for covectors on the
/// flat torus via `T*Y ≅ Y × Im H`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImQuaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ImQuaternion {
    pub const I: ImQuaternion = ImQuaternion::new(1.0, 0.0, 0.0);
    pub const J: ImQuaternion = ImQuaternion::new(0.0, 1.0, 0.0);
    pub const K: ImQuaternion = ImQuaternion::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Basis element `I`, `J`, `K` for `axis = 0, 1, 2`.
    pub fn basis(axis: usize) -> Self {
        match axis {
            0 => Self::I,
            1 => Self::J,
            2 => Self::K,
            _ => panic!("axis {axis} out of range"),
        }
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, t: f64) -> Self {
        Self::new(self.x * t, self.y * t, self.z * t)
    }
}

impl Add for ImQuaternion {
    type Output = ImQuaternion;
    fn add(self, rhs: ImQuaternion) -> ImQuaternion {
        ImQuaternion::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

/// A spinor in `C²`, identified with a quaternion by [`quat_to_spinor`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub s0: C64,
    pub s1: C64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));

    pub const fn new(s0: C64, s1: C64) -> Self {
        Self { s0, s1 }
    }

    /// Spinor `(a + bi, c + di)`.
    pub fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C64::new(a, b), C64::new(c, d))
    }

    /// Real coordinates `(a, b, c, d)`.
    pub fn to_reals(self) -> [f64; 4] {
        [self.s0.re, self.s0.im, self.s1.re, self.s1.im]
    }

    pub fn norm_sqr(self) -> f64 {
        self.s0.norm_sqr() + self.s1.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Real inner product `Re(s₀ t̄₀ + s₁ t̄₁)`.
    pub fn dot(self, other: Spinor) -> f64 {
        (self.s0 * other.s0.conj() + self.s1 * other.s1.conj()).re
    }

    pub fn scale(self, t: f64) -> Self {
        Self::new(self.s0 * t, self.s1 * t)
    }

    /// Multiplication by a complex scalar.
    pub fn cmul(self, z: C64) -> Self {
        Self::new(self.s0 * z, self.s1 * z)
    }

    pub fn max_abs(self) -> f64 {
        self.s0.norm().max(self.s1.norm())
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.s0 + rhs.s0, self.s1 + rhs.s1)
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, rhs: Spinor) {
        self.s0 += rhs.s0;
        self.s1 += rhs.s1;
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.s0 - rhs.s0, self.s1 - rhs.s1)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.s0, -self.s1)
    }
}

/// `a + bI + cJ + dK ↦ (a + bi, c + di)`.
pub fn quat_to_spinor(q: Quaternion) -> Spinor {
    Spinor::from_reals(q.w, q.x, q.y, q.z)
}

pub fn spinor_to_quat(s: Spinor) -> Quaternion {
    Quaternion::from_array(s.to_reals())
}

/// Clifford action of `v` on `s`: left quaternion multiplication.
pub fn clifford_act(v: ImQuaternion, s: Spinor) -> Spinor {
    quat_to_spinor(v.to_quaternion() * spinor_to_quat(s))
}

/// The commuting Clifford module structure: `s ↦ s·v`. Squares to `-|v|²`,
/// commutes with [`clifford_act`] and is complex-linear.
pub fn right_clifford_act(v: ImQuaternion, s: Spinor) -> Spinor {
    quat_to_spinor(spinor_to_quat(s) * v.to_quaternion())
}
