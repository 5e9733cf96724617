//! Compressed-row view of the structurally sparse generator factors.
//!
//! Hamiltonians and jump operators of the Dicke family have O(d) nonzeros,
//! so applying them to a dense operator costs O(d²) instead of a dense O(d³)
//! product. Only the generator uses this form; every public quantity is still
//! a dense [`OperatorMatrix`](crate::OperatorMatrix).

use ndarray::{Array2, ArrayView2, Axis};
use num_traits::Zero;

use crate::scalar::{Cx, Real};

#[derive(Debug, Clone)]
pub struct CsrMatrix<R: Real> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Cx<R>>,
}

impl<R: Real> CsrMatrix<R> {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: ArrayView2<'_, Cx<R>>) -> Self {
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in m.axis_iter(Axis(0)) {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cols.push(j);
                    vals.push(*v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn to_dense(&self) -> Array2<Cx<R>> {
        let mut out = Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[[i, self.cols[k]]] = self.vals[k];
            }
        }
        out
    }

    /// `out += alpha · S · a`.
    pub fn left_mul_acc(&self, alpha: Cx<R>, a: &Array2<Cx<R>>, out: &mut Array2<Cx<R>>) {
        let d = self.dim;
        let src = a.as_slice().expect("standard layout");
        let dst = out.as_slice_mut().expect("standard layout");
        for i in 0..d {
            let out_row = &mut dst[i * d..(i + 1) * d];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.vals[k] * alpha;
                let j = self.cols[k];
                let in_row = &src[j * d..(j + 1) * d];
                for (o, x) in out_row.iter_mut().zip(in_row) {
                    *o += v * *x;
                }
            }
        }
    }

    /// `out += alpha · a · S`.
    pub fn right_mul_acc(&self, alpha: Cx<R>, a: &Array2<Cx<R>>, out: &mut Array2<Cx<R>>) {
        let d = self.dim;
        let src = a.as_slice().expect("standard layout");
        let dst = out.as_slice_mut().expect("standard layout");
        for r in 0..d {
            let in_row = &src[r * d..(r + 1) * d];
            let out_row = &mut dst[r * d..(r + 1) * d];
            for (i, x) in in_row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let xa = *x * alpha;
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    out_row[self.cols[k]] += xa * self.vals[k];
                }
            }
        }
    }

    pub fn left_mul(&self, a: &Array2<Cx<R>>) -> Array2<Cx<R>> {
        let mut out = Array2::zeros(a.raw_dim());
        self.left_mul_acc(Cx::new(R::one(), R::zero()), a, &mut out);
        out
    }

    pub fn right_mul(&self, a: &Array2<Cx<R>>) -> Array2<Cx<R>> {
        let mut out = Array2::zeros(a.raw_dim());
        self.right_mul_acc(Cx::new(R::one(), R::zero()), a, &mut out);
        out
    }

    /// Largest absolute row sum (the ∞-norm).
    pub fn row_sum_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.norm().to_f64().unwrap_or(f64::INFINITY))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut dense = self.to_dense().t().to_owned();
        dense.mapv_inplace(|z| z.conj());
        Self::from_dense(dense.view())
    }
}
