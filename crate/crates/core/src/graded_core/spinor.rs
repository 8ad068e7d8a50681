use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{GradedMatrix, Parity};
use crate::sparse::SparseMatrix;

/// Self-adjoint anticommuting unitaries γ_1..γ_n on ℂ^{2^⌊n/2⌋}.
///
/// For even n the γ_j are odd for the grading diag(1..1, −1..−1); for odd n
/// the representation is ungraded and the γ_j are stored as even operators
/// on an all-even space.
#[derive(Clone, Debug)]
pub struct SpinorRep {
    n: usize,
    gamma: Vec<GradedMatrix>,
}

impl SpinorRep {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        let g = &self.gamma[0];
        g.even_dim() + g.odd_dim()
    }

    pub fn is_graded(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    pub fn gamma(&self) -> &[GradedMatrix] {
        &self.gamma
    }

    /// Dense copies of the γ_j.
    pub fn dense(&self) -> Vec<DMatrix<Complex64>> {
        self.gamma.iter().map(|g| g.entries().to_dense()).collect()
    }
}

fn dense_gammas(n: usize) -> Vec<DMatrix<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    if n == 1 {
        return alloc::vec![DMatrix::from_element(1, 1, one)];
    }
    if n % 2 == 1 {
        // previous even set plus the chirality diag(1, −1)
        let mut g = dense_gammas(n - 1);
        let d = g[0].nrows();
        g.push(DMatrix::from_fn(d, d, |r, c| {
            if r != c {
                Complex64::new(0.0, 0.0)
            } else if r < d / 2 {
                one
            } else {
                -one
            }
        }));
        return g;
    }
    let prev = dense_gammas(n - 1);
    let d = prev[0].nrows();
    let mut out: Vec<DMatrix<Complex64>> = prev
        .iter()
        .map(|p| {
            let mut m = DMatrix::zeros(2 * d, 2 * d);
            m.view_mut((0, d), (d, d)).copy_from(p);
            m.view_mut((d, 0), (d, d)).copy_from(p);
            m
        })
        .collect();
    let mut last = DMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        last[(k, d + k)] = -i;
        last[(d + k, k)] = i;
    }
    out.push(last);
    out
}

/// Pauli-recursion spinor representation of ℂl_n.
pub fn spinor_rep(n: usize) -> SpinorRep {
    assert!(n >= 1, "spinor_rep needs n >= 1");
    let dense = dense_gammas(n);
    let d = dense[0].nrows();
    let (even, odd, parity) = if n.is_multiple_of(2) {
        (d / 2, d / 2, Parity::Odd)
    } else {
        (d, 0, Parity::Even)
    };
    let gamma = dense
        .iter()
        .map(|m| {
            GradedMatrix::square(even, odd, SparseMatrix::from_dense(m), parity)
                .expect("recursion produces block-off-diagonal gammas")
        })
        .collect();
    SpinorRep { n, gamma }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relation_defect(rep: &SpinorRep) -> f64 {
        let g = rep.dense();
        let d = rep.dim();
        let mut worst: f64 = 0.0;
        for j in 0..g.len() {
            for k in 0..g.len() {
                let mut want = DMatrix::<Complex64>::zeros(d, d);
                if j == k {
                    want = DMatrix::identity(d, d) * Complex64::new(2.0, 0.0);
                }
                let got = &g[j] * &g[k] + &g[k] * &g[j];
                worst = worst.max((got - want).norm());
            }
        }
        worst
    }

    #[test]
    fn sizes_follow_floor_half() {
        for (n, d) in [(1, 1), (2, 2), (3, 2), (4, 4), (5, 4), (6, 8)] {
            assert_eq!(spinor_rep(n).dim(), d);
        }
    }

    #[test]
    fn rep_two_is_pauli_pair() {
        let g = spinor_rep(2).dense();
        assert_eq!(g[0][(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(g[1][(0, 1)], Complex64::new(0.0, -1.0));
        assert!(relation_defect(&spinor_rep(2)) < 1e-15);
    }

    #[test]
    fn rep_three_relations() {
        assert!(relation_defect(&spinor_rep(3)) < 1e-15);
    }
}
