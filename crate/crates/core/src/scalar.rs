//! Scalar abstraction.
//!
//! Every numerical routine in the crate is written against [`Real`], which
//! bundles the `num-traits` float interface with the two LAPACK entry points
//! the engine needs (Hermitian eigendecomposition with and without vectors).
//! Complex amplitudes are always `Complex<R>`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, EigValsh, UPLO};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

use crate::error::{Error, Result};

/// Complex amplitude over the real scalar `R`.
pub type Cx<R> = Complex<R>;

/// Real floating-point scalar usable by the engine (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Machine-level noise floor used when comparing against zero.
    fn noise() -> Self;

    /// Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix.
    fn eigh(m: &Array2<Cx<Self>>) -> Result<(Array1<Self>, Array2<Cx<Self>>)>;

    /// Eigenvalues (ascending) of a Hermitian matrix.
    fn eigvalsh(m: &Array2<Cx<Self>>) -> Result<Array1<Self>>;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }
}

macro_rules! impl_real {
    ($t:ty, $noise:expr) => {
        impl Real for $t {
            fn noise() -> Self {
                $noise
            }

            fn eigh(m: &Array2<Cx<Self>>) -> Result<(Array1<Self>, Array2<Cx<Self>>)> {
                m.eigh(UPLO::Upper)
                    .map_err(|e| Error::Eigen(e.to_string()))
            }

            fn eigvalsh(m: &Array2<Cx<Self>>) -> Result<Array1<Self>> {
                m.eigvalsh(UPLO::Upper)
                    .map_err(|e| Error::Eigen(e.to_string()))
            }
        }
    };
}

impl_real!(f64, 1e-14);
impl_real!(f32, 1e-6);

/// Shorthand for building a complex number from `f64` parts.
#[inline]
pub fn cx<R: Real>(re: f64, im: f64) -> Cx<R> {
    Complex::new(R::lit(re), R::lit(im))
}

/// Real scalar lifted to the complex plane.
#[inline]
pub fn re<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}
