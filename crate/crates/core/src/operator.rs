//! Dense operators on a truncated spin ⊗ boson space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array2, Zip};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hilbert::HilbertGeometry;
use crate::scalar::{Cx, Real};

/// Relative Hermiticity tolerance enforced when `hermitian_hint` is set.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex square matrix tagged with the Hilbert geometry it acts on.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix<R: Real> {
    data: Array2<Cx<R>>,
    geometry: HilbertGeometry,
    hermitian_hint: bool,
}

impl<R: Real> fmt::Debug for OperatorMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorMatrix")
            .field("geometry", &self.geometry)
            .field("hermitian_hint", &self.hermitian_hint)
            .finish_non_exhaustive()
    }
}

impl<R: Real> OperatorMatrix<R> {
    pub fn new(data: Array2<Cx<R>>, geometry: HilbertGeometry) -> Result<Self> {
        let d = geometry.total_dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                got: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self {
            data,
            geometry,
            hermitian_hint: false,
        })
    }

    /// Builds an operator and marks it Hermitian, checking the claim.
    pub fn new_hermitian(data: Array2<Cx<R>>, geometry: HilbertGeometry) -> Result<Self> {
        let op = Self::new(data, geometry)?;
        op.with_hermitian_hint()
    }

    /// Marks the operator Hermitian after verifying it.
    pub fn with_hermitian_hint(mut self) -> Result<Self> {
        let dev = self.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        self.hermitian_hint = true;
        Ok(self)
    }

    pub(crate) fn from_parts(data: Array2<Cx<R>>, geometry: HilbertGeometry, hermitian: bool) -> Self {
        debug_assert_eq!(data.nrows(), geometry.total_dim());
        Self {
            data,
            geometry,
            hermitian_hint: hermitian,
        }
    }

    pub fn zeros(geometry: HilbertGeometry) -> Self {
        let d = geometry.total_dim();
        Self::from_parts(Array2::zeros((d, d)), geometry, true)
    }

    pub fn identity(geometry: HilbertGeometry) -> Self {
        let d = geometry.total_dim();
        Self::from_parts(Array2::eye(d), geometry, true)
    }

    pub fn data(&self) -> &Array2<Cx<R>> {
        &self.data
    }

    pub fn into_data(self) -> Array2<Cx<R>> {
        self.data
    }

    pub fn geometry(&self) -> HilbertGeometry {
        self.geometry
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn get(&self, row: usize, col: usize) -> Cx<R> {
        self.data[[row, col]]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_parts(conj_transpose(&self.data), self.geometry, self.hermitian_hint)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> R {
        max_abs(&self.data)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    /// `max|A − A†| / max|A|` (zero for the zero matrix).
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.data)
    }

    pub fn trace(&self) -> Cx<R> {
        self.data.diag().iter().fold(Cx::zero(), |acc, z| acc + z)
    }

    pub fn scale(&self, factor: Cx<R>) -> Self {
        let hermitian = self.hermitian_hint && factor.im == R::zero();
        Self::from_parts(self.data.mapv(|z| z * factor), self.geometry, hermitian)
    }

    pub fn scale_real(&self, factor: R) -> Self {
        Self::from_parts(self.data.mapv(|z| z * factor), self.geometry, self.hermitian_hint)
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(Self::from_parts(self.data.dot(&rhs.data), self.geometry, false))
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(Self::from_parts(commutator(&self.data, &rhs.data), self.geometry, false))
    }

    /// `{self, rhs} = self·rhs + rhs·self`.
    pub fn anticommutator(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        let hermitian = self.hermitian_hint && rhs.hermitian_hint;
        Ok(Self::from_parts(anticommutator(&self.data, &rhs.data), self.geometry, hermitian))
    }

    /// Symmetrizes in place, `A ← (A + A†)/2`, and sets the Hermitian hint.
    pub fn symmetrize(&mut self) {
        symmetrize(&mut self.data);
        self.hermitian_hint = true;
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    /// Casts to another scalar precision.
    pub fn cast<S: Real>(&self) -> OperatorMatrix<S> {
        let data = self.data.mapv(|z| {
            Complex::new(
                S::from_f64(z.re.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan),
                S::from_f64(z.im.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(S::nan),
            )
        });
        OperatorMatrix::from_parts(data, self.geometry, self.hermitian_hint)
    }
}

impl<R: Real> Add for &OperatorMatrix<R> {
    type Output = OperatorMatrix<R>;
    fn add(self, rhs: Self) -> OperatorMatrix<R> {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix::from_parts(
            &self.data + &rhs.data,
            self.geometry,
            self.hermitian_hint && rhs.hermitian_hint,
        )
    }
}

impl<R: Real> Sub for &OperatorMatrix<R> {
    type Output = OperatorMatrix<R>;
    fn sub(self, rhs: Self) -> OperatorMatrix<R> {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix::from_parts(
            &self.data - &rhs.data,
            self.geometry,
            self.hermitian_hint && rhs.hermitian_hint,
        )
    }
}

impl<R: Real> Mul for &OperatorMatrix<R> {
    type Output = OperatorMatrix<R>;
    fn mul(self, rhs: Self) -> OperatorMatrix<R> {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix::from_parts(self.data.dot(&rhs.data), self.geometry, false)
    }
}

impl<R: Real> Neg for &OperatorMatrix<R> {
    type Output = OperatorMatrix<R>;
    fn neg(self) -> OperatorMatrix<R> {
        OperatorMatrix::from_parts(self.data.mapv(|z| -z), self.geometry, self.hermitian_hint)
    }
}

pub(crate) fn conj_transpose<R: Real>(m: &Array2<Cx<R>>) -> Array2<Cx<R>> {
    let mut out = m.t().to_owned();
    out.mapv_inplace(|z| z.conj());
    out
}

pub(crate) fn commutator<R: Real>(a: &Array2<Cx<R>>, b: &Array2<Cx<R>>) -> Array2<Cx<R>> {
    let mut out = a.dot(b);
    out -= &b.dot(a);
    out
}

pub(crate) fn anticommutator<R: Real>(a: &Array2<Cx<R>>, b: &Array2<Cx<R>>) -> Array2<Cx<R>> {
    let mut out = a.dot(b);
    out += &b.dot(a);
    out
}

pub(crate) fn max_abs<R: Real>(m: &Array2<Cx<R>>) -> R {
    m.iter().fold(R::zero(), |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermiticity_deviation<R: Real>(m: &Array2<Cx<R>>) -> f64 {
    let scale = max_abs(m);
    if scale == R::zero() {
        return 0.0;
    }
    let d = m.nrows();
    let mut dev = R::zero();
    for i in 0..d {
        for j in i..d {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    (dev / scale).to_f64().unwrap_or(f64::INFINITY)
}

pub(crate) fn symmetrize<R: Real>(m: &mut Array2<Cx<R>>) {
    let d = m.nrows();
    let half = R::lit(0.5);
    for i in 0..d {
        for j in i..d {
            let v = (m[[i, j]] + m[[j, i]].conj()) * half;
            m[[i, j]] = v;
            m[[j, i]] = v.conj();
        }
    }
}

/// `Tr(x · y)` without forming the product.
pub(crate) fn trace_of_product<R: Real>(x: &Array2<Cx<R>>, y: &Array2<Cx<R>>) -> Cx<R> {
    // Tr(XY) = Σ_ij X_ij Y_ji
    let mut acc = Cx::<R>::zero();
    Zip::from(x).and(&y.t()).for_each(|a, b| acc += *a * *b);
    acc
}

/// `Tr(x† · y) = Σ conj(x_ij) y_ij`.
pub(crate) fn inner<R: Real>(x: &Array2<Cx<R>>, y: &Array2<Cx<R>>) -> Cx<R> {
    let mut acc = Cx::<R>::zero();
    Zip::from(x).and(y).for_each(|a, b| acc += a.conj() * *b);
    acc
}

/// Kronecker product of two dense matrices.
pub fn kron<R: Real>(a: &Array2<Cx<R>>, b: &Array2<Cx<R>>) -> Array2<Cx<R>> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let s = a[[i, j]];
            if s == Cx::zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = s * b[[k, l]];
                }
            }
        }
    }
    out
}

pub(crate) fn identity<R: Real>(n: usize) -> Array2<Cx<R>> {
    Array2::from_diag_elem(n, Cx::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{HilbertGeometry, SpinMode};
    use ndarray::array;

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = identity::<f64>(2);
        let i3 = identity::<f64>(3);
        assert_eq!(kron(&i2, &i3), identity::<f64>(6));
    }

    #[test]
    fn trace_of_product_matches_dot() {
        let x = array![[Cx::new(1.0, 2.0), Cx::new(0.5, 0.0)], [Cx::new(-1.0, 1.0), Cx::new(3.0, -2.0)]];
        let y = array![[Cx::new(0.0, 1.0), Cx::new(2.0, 0.0)], [Cx::new(1.0, 1.0), Cx::new(-1.0, 0.5)]];
        let direct = x.dot(&y).diag().sum();
        assert!((trace_of_product(&x, &y) - direct).norm() < 1e-14);
    }

    #[test]
    fn hermitian_hint_is_checked() {
        let g = HilbertGeometry::new(1, SpinMode::Collective, 2).unwrap();
        let mut m = Array2::<Cx<f64>>::zeros((4, 4));
        m[[0, 1]] = Cx::new(1.0, 0.0);
        assert!(OperatorMatrix::new_hermitian(m.clone(), g).is_err());
        m[[1, 0]] = Cx::new(1.0, 0.0);
        assert!(OperatorMatrix::new_hermitian(m, g).is_ok());
    }

    #[test]
    fn wrong_size_rejected() {
        let g = HilbertGeometry::new(1, SpinMode::Collective, 2).unwrap();
        let m = Array2::<Cx<f64>>::zeros((3, 3));
        assert!(matches!(OperatorMatrix::new(m, g), Err(Error::Dimension { .. })));
    }
}
