//! Quaternionic 3/2-spinor algebra, the aquaternionic moduli space `W^μ/S¹`,
//! and lattice Rarita-Schwinger / Fueter operators on a flat periodic 3-torus.
//!
//! Layering, bottom-up:
//!
//! * [`clifford`]: quaternions, spinors in `C²`, the Clifford action.
//! * [`spinor_hom`]: the 12-dimensional space `Hom(C ⊗ Im H, H)` of 2×3 complex
//!   matrices, the contraction `c`, the embedding `ι`, the projector onto `ker c`,
//!   the hyperkähler triple and the moment map.
//! * [`moduli`]: charts, frames and the symbol of the 3/2-Fueter operator on `W^μ`.
//! * [`lattice`]: fields on a periodic cubic lattice, covariant derivatives,
//!   the twisted Dirac operator, curvature and residuals; binary checkpoints.
//! * [`flow`]: projected gradient descent on the blow-up energy.
//! * [`verify`]: the named property suite shared by the CLI and the tests.

// Negated comparisons (`!(x > 0.0)`) are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod error;
pub mod flow;
pub mod lattice;
pub mod linalg;
pub mod moduli;
pub mod rng;
pub mod spinor_hom;
pub mod verify;

pub use clifford::{
    clifford_act, quat_mul, quat_to_spinor, right_clifford_act, spinor_to_quat, ImQuaternion,
    Quaternion, Spinor, C64,
};
pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowReport, FlowState};
pub use lattice::{LatticeGeometry, ResidualMode, Residuals, SpinorHomField, U1Connection};
pub use moduli::{ChartTag, FrameBundle, SymbolMatrix, WmuChartPoint};
pub use spinor_hom::{Axis, MomentValue, SpinorHom};
pub use verify::{SuiteConfig, SuiteReport};
