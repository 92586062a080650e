//! Minimal dense row-major matrix and the few vector kernels the networks
//! need. Everything is `f64`; reductions run in a fixed order so results are
//! bit-reproducible.

use serde::{Deserialize, Serialize};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Shape/len consistency check, used after deserializing untrusted input.
    pub fn is_consistent(&self) -> bool {
        self.data.len() == self.rows * self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(r), x);
        }
    }

    /// `out += self^T * v`.
    pub fn tr_mul_vec_acc(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (r, &vr) in v.iter().enumerate() {
            axpy(vr, self.row(r), out);
        }
    }

    /// Rank-one accumulate: `self += u * v^T`.
    pub fn add_outer(&mut self, u: &[f64], v: &[f64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        let cols = self.cols;
        for (r, &ur) in u.iter().enumerate() {
            axpy(ur, v, &mut self.data[r * cols..(r + 1) * cols]);
        }
    }
}

/// Dot product with four running sums; fixed association, so deterministic.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        s0 += a[j] * b[j];
        s1 += a[j + 1] * b[j + 1];
        s2 += a[j + 2] * b[j + 2];
        s3 += a[j + 3] * b[j + 3];
    }
    let mut s = (s0 + s1) + (s2 + s3);
    for j in chunks * 4..a.len() {
        s += a[j] * b[j];
    }
    s
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_matches_naive() {
        let a = Matrix::from_fn(3, 5, |r, c| (r * 5 + c) as f64 * 0.25 - 1.0);
        let x: Vec<f64> = (0..5).map(|i| i as f64 - 2.0).collect();
        let mut out = vec![0.0; 3];
        a.mul_vec_into(&x, &mut out);
        for r in 0..3 {
            let naive: f64 = (0..5).map(|c| a.get(r, c) * x[c]).sum();
            assert!((out[r] - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn transpose_matvec_accumulates() {
        let a = Matrix::from_fn(2, 3, |r, c| (r + c) as f64);
        let v = [1.0, -2.0];
        let mut out = vec![0.5; 3];
        a.tr_mul_vec_acc(&v, &mut out);
        for c in 0..3 {
            let naive: f64 = 0.5 + a.get(0, c) * v[0] + a.get(1, c) * v[1];
            assert!((out[c] - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn outer_product_accumulates() {
        let mut a = Matrix::zeros(2, 2);
        a.add_outer(&[1.0, 2.0], &[3.0, 4.0]);
        a.add_outer(&[1.0, 0.0], &[1.0, 1.0]);
        assert_eq!(a.data, vec![4.0, 5.0, 6.0, 8.0]);
    }

    #[test]
    fn dot_matches_naive_on_odd_lengths() {
        let a: Vec<f64> = (0..13).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..13).map(|i| (i as f64).cos()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }
}
