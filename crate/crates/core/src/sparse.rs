//! Compressed-row complex matrices.
//!
//! Grid-based blocks are banded (central differences times small fiber
//! matrices), so every block is kept in CSR form and only densified for
//! eigenvalue work on small connected components.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        SparseMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let mut t: Vec<(usize, usize, Complex64)> = triplets.into_iter().collect();
        t.sort_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != ZERO {
                    t.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |p| (r, self.indices[p], self.values[p]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |p| (self.indices[p], self.values[p]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        match self.indices[lo..hi].binary_search(&c) {
            Ok(p) => self.values[lo + p],
            Err(_) => ZERO,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn map_values(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        Self::from_triplets(self.rows, self.cols, self.iter().map(|(r, c, v)| (r, c, f(r, c, v))))
    }

    fn check_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::Dimension {
                context,
                expected: self.rows,
                found: other.rows,
            });
        }
        if self.cols != other.cols {
            return Err(Error::Dimension {
                context,
                expected: self.cols,
                found: other.cols,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "matrix addition")?;
        Ok(Self::from_triplets(self.rows, self.cols, self.iter().chain(other.iter())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "matrix subtraction")?;
        Ok(Self::from_triplets(
            self.rows,
            self.cols,
            self.iter().chain(other.iter().map(|(r, c, v)| (r, c, -v))),
        ))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                context: "matrix product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut acc = vec![ZERO; other.cols];
        let mut mark = vec![usize::MAX; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.rows {
            touched.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = ZERO;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                indices.push(c);
                values.push(acc[c]);
            }
            indptr[r + 1] = indices.len();
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            indptr,
            indices,
            values,
        })
    }

    /// Kronecker product with `self` as the outer (slow) index.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.iter() {
            for (r2, c2, b) in other.iter() {
                t.push((r1 * other.rows + r2, c1 * other.cols + c2, a * b));
            }
        }
        Self::from_triplets(rows, cols, t)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// Places `blocks[i][j]` (or zeros) into a block grid with the given row/column sizes.
    pub fn block(row_sizes: &[usize], col_sizes: &[usize], blocks: &[(usize, usize, &SparseMatrix)]) -> Self {
        let row_off: Vec<usize> = offsets(row_sizes);
        let col_off: Vec<usize> = offsets(col_sizes);
        let rows = *row_off.last().unwrap();
        let cols = *col_off.last().unwrap();
        let mut t = Vec::new();
        for &(bi, bj, m) in blocks {
            assert_eq!(m.rows, row_sizes[bi], "block row size");
            assert_eq!(m.cols, col_sizes[bj], "block column size");
            for (r, c, v) in m.iter() {
                t.push((row_off[bi] + r, col_off[bj] + c, v));
            }
        }
        Self::from_triplets(rows, cols, t)
    }

    /// Sub-block `[r0, r0+nr) x [c0, c0+nc)`.
    pub fn slice(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Self {
        let mut t = Vec::new();
        for r in r0..r0 + nr {
            for (c, v) in self.row(r) {
                if c >= c0 && c < c0 + nc {
                    t.push((r - r0, c - c0, v));
                }
            }
        }
        Self::from_triplets(nr, nc, t)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v.norm_sqr()).sum())
    }

    /// Drops entries with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self::from_triplets(
            self.rows,
            self.cols,
            self.iter().filter(|(_, _, v)| v.norm() > tol),
        )
    }
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    off.push(0);
    for s in sizes {
        acc += s;
        off.push(acc);
    }
    off
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseMatrix::from_triplets(3, 2, [(0, 0, c(1.0, 1.0)), (2, 1, c(-2.0, 0.5)), (1, 0, c(0.0, 3.0))]);
        let b = SparseMatrix::from_triplets(2, 3, [(0, 2, c(1.0, 0.0)), (1, 0, c(0.5, -1.0)), (1, 1, c(2.0, 0.0))]);
        let p = a.matmul(&b).unwrap().to_dense();
        let q = a.to_dense() * b.to_dense();
        assert!((p - q).norm() < 1e-15);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0))]);
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 1), c(3.0, 0.0));
        assert_eq!(a.get(1, 1), ZERO);
    }

    #[test]
    fn kron_ordering() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, c(1.0, 0.0))]);
        let b = SparseMatrix::from_real_diagonal(&[2.0, 3.0]);
        let k = a.kron(&b);
        assert_eq!(k.get(0, 2), c(2.0, 0.0));
        assert_eq!(k.get(1, 3), c(3.0, 0.0));
        assert_eq!(k.nnz(), 2);
    }
}
