//! Eigenvalues and norms of sparse blocks.
//!
//! A Hermitian block is split into the connected components of its sparsity
//! graph (after dropping entries at rounding level) and each component is
//! diagonalised densely. Positivity and condition-2 matrices are pointwise in
//! the grid coordinate, so components are fiber-sized and this is exact.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::sparse::SparseMatrix;

const PRUNE_REL: f64 = 1e-15;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Index sets of the connected components of a square matrix's sparsity graph.
pub fn components(a: &SparseMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let tol = PRUNE_REL * a.max_abs();
    let mut parent: Vec<usize> = (0..n).collect();
    for (r, c, v) in a.iter() {
        if v.norm() > tol {
            let (x, y) = (find(&mut parent, r), find(&mut parent, c));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = out.len();
            out.push(Vec::new());
        }
        out[label[root]].push(i);
    }
    out
}

fn component_eigenvalues(a: &SparseMatrix, idx: &[usize]) -> Vec<f64> {
    if idx.len() == 1 {
        return vec![a.get(idx[0], idx[0]).re];
    }
    let m = DMatrix::<Complex64>::from_fn(idx.len(), idx.len(), |i, j| {
        let x = a.get(idx[i], idx[j]);
        let y = a.get(idx[j], idx[i]).conj();
        (x + y) * 0.5
    });
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &SparseMatrix) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols(), "Hermitian eigenvalues need a square matrix");
    let mut ev: Vec<f64> = components(a)
        .iter()
        .flat_map(|idx| component_eigenvalues(a, idx))
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest and largest eigenvalue of a Hermitian matrix; `(0, 0)` for an empty one.
pub fn hermitian_extremes(a: &SparseMatrix) -> (f64, f64) {
    let ev = hermitian_eigenvalues(a);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &SparseMatrix) -> f64 {
    if a.nnz() == 0 {
        return 0.0;
    }
    let adj = a.adjoint();
    let gram = if a.cols() <= a.rows() {
        adj.matmul(a)
    } else {
        a.matmul(&adj)
    }
    .expect("shapes agree by construction");
    let (_, hi) = hermitian_extremes(&gram);
    libm::sqrt(hi.max(0.0))
}

/// Norm of `A - A*` relative to the norm of `A` (zero for the zero matrix).
pub fn self_adjoint_defect(a: &SparseMatrix) -> f64 {
    let norm = spectral_norm(a);
    if norm == 0.0 {
        return 0.0;
    }
    let diff = a.sub(&a.adjoint()).expect("square");
    spectral_norm(&diff) / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_diagonal_eigenvalues() {
        let i = Complex64::new(0.0, 1.0);
        let a = SparseMatrix::from_triplets(
            4,
            4,
            [
                (0, 0, Complex64::new(3.0, 0.0)),
                (1, 2, -i),
                (2, 1, i),
                (3, 3, Complex64::new(-1.5, 0.0)),
            ],
        );
        let ev = hermitian_eigenvalues(&a);
        let want = [-1.5, -1.0, 1.0, 3.0];
        for (x, y) in ev.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(components(&a).len(), 3);
    }

    #[test]
    fn norm_of_rectangular() {
        let a = SparseMatrix::from_triplets(1, 2, [(0, 0, Complex64::new(3.0, 0.0)), (0, 1, Complex64::new(0.0, 4.0))]);
        assert!((spectral_norm(&a) - 5.0).abs() < 1e-14);
    }
}
