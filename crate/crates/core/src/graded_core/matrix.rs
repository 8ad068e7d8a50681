use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::Parity;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::spectral;

/// Homogeneous operator between graded spaces laid out as `[even; odd]`.
///
/// A space with no odd summand is treated as ungraded.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    rows: (usize, usize),
    cols: (usize, usize),
    entries: SparseMatrix,
    parity: Parity,
}

fn index_parity(i: usize, dims: (usize, usize)) -> Parity {
    if i < dims.0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

impl GradedMatrix {
    /// Checks shape and that `entries` lives in the blocks allowed by `parity`.
    pub fn new(rows: (usize, usize), cols: (usize, usize), entries: SparseMatrix, parity: Parity) -> Result<Self> {
        if entries.rows() != rows.0 + rows.1 {
            return Err(Error::Dimension {
                context: "graded matrix rows",
                expected: rows.0 + rows.1,
                found: entries.rows(),
            });
        }
        if entries.cols() != cols.0 + cols.1 {
            return Err(Error::Dimension {
                context: "graded matrix columns",
                expected: cols.0 + cols.1,
                found: entries.cols(),
            });
        }
        let tol = 1e-12 * entries.max_abs();
        for (r, c, v) in entries.iter() {
            if index_parity(r, rows) + index_parity(c, cols) != parity && v.norm() > tol {
                return Err(Error::Parity("entry outside the blocks allowed by the declared parity"));
            }
        }
        let entries = SparseMatrix::from_triplets(
            entries.rows(),
            entries.cols(),
            entries
                .iter()
                .filter(|&(r, c, _)| index_parity(r, rows) + index_parity(c, cols) == parity),
        );
        Ok(GradedMatrix {
            rows,
            cols,
            entries,
            parity,
        })
    }

    /// Square operator on a space with `even_dim + odd_dim` basis vectors.
    pub fn square(even_dim: usize, odd_dim: usize, entries: SparseMatrix, parity: Parity) -> Result<Self> {
        Self::new((even_dim, odd_dim), (even_dim, odd_dim), entries, parity)
    }

    pub fn identity(even_dim: usize, odd_dim: usize) -> Self {
        GradedMatrix {
            rows: (even_dim, odd_dim),
            cols: (even_dim, odd_dim),
            entries: SparseMatrix::identity(even_dim + odd_dim),
            parity: Parity::Even,
        }
    }

    pub fn zero(rows: (usize, usize), cols: (usize, usize), parity: Parity) -> Self {
        GradedMatrix {
            rows,
            cols,
            entries: SparseMatrix::zeros(rows.0 + rows.1, cols.0 + cols.1),
            parity,
        }
    }

    /// Grading operator diag(1, −1).
    pub fn grading(even_dim: usize, odd_dim: usize) -> Self {
        let d: Vec<f64> = (0..even_dim + odd_dim)
            .map(|i| if i < even_dim { 1.0 } else { -1.0 })
            .collect();
        GradedMatrix::identity(even_dim, odd_dim).with_entries_unchecked(SparseMatrix::from_real_diagonal(&d))
    }

    fn with_entries_unchecked(mut self, entries: SparseMatrix) -> Self {
        self.entries = entries;
        self
    }

    /// Splits an arbitrary matrix into its even and odd homogeneous parts.
    pub fn split(rows: (usize, usize), cols: (usize, usize), entries: &SparseMatrix) -> (Self, Self) {
        let part = |p: Parity| {
            let e = SparseMatrix::from_triplets(
                entries.rows(),
                entries.cols(),
                entries
                    .iter()
                    .filter(|&(r, c, _)| index_parity(r, rows) + index_parity(c, cols) == p),
            );
            GradedMatrix {
                rows,
                cols,
                entries: e,
                parity: p,
            }
        };
        (part(Parity::Even), part(Parity::Odd))
    }

    pub fn rows(&self) -> (usize, usize) {
        self.rows
    }

    pub fn cols(&self) -> (usize, usize) {
        self.cols
    }

    pub fn even_dim(&self) -> usize {
        self.cols.0
    }

    pub fn odd_dim(&self) -> usize {
        self.cols.1
    }

    pub fn is_ungraded(&self) -> bool {
        self.rows.1 == 0 && self.cols.1 == 0
    }

    pub fn entries(&self) -> &SparseMatrix {
        &self.entries
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn adjoint(&self) -> Self {
        GradedMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.adjoint(),
            parity: self.parity,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        GradedMatrix {
            entries: self.entries.scale(s),
            ..self.clone()
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.parity != other.parity {
            return Err(Error::Parity("sum of operators with different parity is not homogeneous"));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension {
                context: "graded matrix sum",
                expected: self.entries.rows(),
                found: other.entries.rows(),
            });
        }
        Ok(GradedMatrix {
            entries: self.entries.add(&other.entries)?,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                context: "graded matrix product",
                expected: self.cols.0 + self.cols.1,
                found: other.rows.0 + other.rows.1,
            });
        }
        Ok(GradedMatrix {
            rows: self.rows,
            cols: other.cols,
            entries: self.entries.matmul(&other.entries)?,
            parity: self.parity + other.parity,
        })
    }

    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        spectral::spectral_norm(&self.entries)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.entries.sub(&other.entries) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }
}

/// AB − (−1)^{deg A · deg B} BA
pub fn graded_commutator(a: &GradedMatrix, b: &GradedMatrix) -> Result<GradedMatrix> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    ab.sub(&ba.scale_real(Parity::koszul(a.parity, b.parity)))
}

/// Position of each product basis vector `(i, j)` (index `i * w + j`) in the
/// `[even; odd]` layout of V⊗W, plus the even dimension. Even pairs keep
/// their lexicographic order, then odd pairs.
pub fn tensor_layout(v: (usize, usize), w: (usize, usize)) -> (Vec<usize>, usize) {
    let vd = v.0 + v.1;
    let wd = w.0 + w.1;
    let mut pos = vec![0usize; vd * wd];
    let parity = |i: usize, j: usize| index_parity(i, v) + index_parity(j, w);
    let mut next = 0;
    for want in [Parity::Even, Parity::Odd] {
        for i in 0..vd {
            for j in 0..wd {
                if parity(i, j) == want {
                    pos[i * wd + j] = next;
                    next += 1;
                }
            }
        }
    }
    let even = v.0 * w.0 + v.1 * w.1;
    (pos, even)
}

/// Koszul-signed tensor product: (A⊗̂B)(v⊗w) = (−1)^{deg B · deg v} Av ⊗ Bw.
pub fn graded_tensor(a: &GradedMatrix, b: &GradedMatrix) -> GradedMatrix {
    let (row_pos, row_even) = tensor_layout(a.rows, b.rows);
    let (col_pos, col_even) = tensor_layout(a.cols, b.cols);
    let b_rows = b.rows.0 + b.rows.1;
    let b_cols = b.cols.0 + b.cols.1;
    let mut t = Vec::with_capacity(a.entries.nnz() * b.entries.nnz());
    for (ra, ca, x) in a.entries.iter() {
        let sign = Parity::koszul(b.parity, index_parity(ca, a.cols));
        for (rb, cb, y) in b.entries.iter() {
            t.push((row_pos[ra * b_rows + rb], col_pos[ca * b_cols + cb], x * y * sign));
        }
    }
    let rd = (a.rows.0 + a.rows.1) * b_rows;
    let cd = (a.cols.0 + a.cols.1) * b_cols;
    GradedMatrix {
        rows: (row_even, rd - row_even),
        cols: (col_even, cd - col_even),
        entries: SparseMatrix::from_triplets(rd, cd, t),
        parity: a.parity + b.parity,
    }
}
