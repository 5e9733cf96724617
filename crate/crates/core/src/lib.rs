//! Quantum-chaos diagnostics for Dicke-class cavity QED models.
//!
//! Operators are evolved in the Heisenberg picture under the adjoint Lindblad
//! generator and combined into out-of-time-ordered correlators, their
//! time-ordered companions, Wigner–Yanase skew information and the
//! second-order coherence `g²(t)`. Ground-state scans, critical couplings and
//! Lyapunov fits round out the toolkit.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the tolerances in
//! the test-suite assume.

extern crate blas_src;

pub mod analysis;
pub mod correlators;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod models;
pub mod operator;
pub mod scalar;
pub mod sparse;
pub mod thermo;
pub mod workflow;

pub use error::{Error, Result};
pub use hilbert::{HilbertGeometry, SpinMode};
pub use models::{BathSpec, ModelSpec, Variant};
pub use operator::OperatorMatrix;
pub use scalar::{Cx, Real};

/// Double-precision operator.
pub type Operator = OperatorMatrix<f64>;
/// Single-precision operator.
pub type Operator32 = OperatorMatrix<f32>;
