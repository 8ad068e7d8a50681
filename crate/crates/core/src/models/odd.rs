//! Doubling an ungraded (odd) triple to an even one: H⊗ℂ², D⊗ω, ℂl₁ via 1⊗c.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{cplx, AlgebraSample, EquivariantTriple, MetricData};
use crate::error::{Error, Result};
use crate::graded_core::{graded_tensor, GradedMatrix, Parity};
use crate::sectors::{SectorOperator, SectorSpace};
use crate::sparse::SparseMatrix;

fn omega() -> GradedMatrix {
    let m = SparseMatrix::from_triplets(2, 2, [(0, 1, cplx(0.0, -1.0)), (1, 0, cplx(0.0, 1.0))]);
    GradedMatrix::square(1, 1, m, Parity::Odd).expect("off-diagonal")
}

fn flip() -> GradedMatrix {
    let m = SparseMatrix::from_triplets(2, 2, [(0, 1, cplx(1.0, 0.0)), (1, 0, cplx(1.0, 0.0))]);
    GradedMatrix::square(1, 1, m, Parity::Odd).expect("off-diagonal")
}

/// b⊗ω for Clifford-odd data (D, η, c(·)), b⊗1 otherwise. Layout [H⊗e₁; H⊗e₂].
pub fn double_block(b: &GradedMatrix, clifford_odd: bool) -> Result<GradedMatrix> {
    if !b.is_ungraded() {
        return Err(Error::Usage("doubling needs an ungraded operator".into()));
    }
    let second = if clifford_odd { omega() } else { GradedMatrix::identity(1, 1) };
    Ok(graded_tensor(b, &second))
}

/// The ℂl₁ generator 1⊗((0,1),(1,0)) on a doubled space.
pub fn cl1_generator(space: &Arc<SectorSpace>) -> Result<SectorOperator> {
    SectorOperator::diagonal(space, Parity::Odd, |k| {
        let (e, o) = space.block_dims(k)?;
        if e != o {
            return Err(Error::Usage("cl1 generator needs a doubled space".into()));
        }
        Ok(graded_tensor(&GradedMatrix::identity(e, 0), &flip()))
    })
}

pub(crate) fn double_op(op: &SectorOperator, space: &Arc<SectorSpace>, clifford_odd: bool) -> Result<SectorOperator> {
    let parity = if clifford_odd { Parity::Odd } else { Parity::Even };
    op.transport(space, parity, |_, _, b| double_block(b, clifford_odd))
}

/// Doubles every operator of an ungraded triple.
pub fn double_odd(triple: &EquivariantTriple) -> Result<EquivariantTriple> {
    let window = *triple.space.window();
    let mut dims = Vec::new();
    for k in window.characters() {
        let (e, o) = triple.space.block_dims(&k)?;
        if o != 0 {
            return Err(Error::Usage("triple is already graded".into()));
        }
        dims.push((k, e));
    }
    let old = triple.space.clone();
    let space = SectorSpace::from_fn(window, |k| {
        let e = old.block_dims(k).expect("same window").0;
        (e, e)
    });
    let odd = |op: &SectorOperator| double_op(op, &space, true);
    let even = |op: &SectorOperator| double_op(op, &space, false);
    let sample = |s: &AlgebraSample| -> Result<AlgebraSample> {
        Ok(AlgebraSample {
            op: even(&s.op)?,
            ..s.clone()
        })
    };
    let metric = match &triple.metric {
        None => None,
        Some(m) => Some(MetricData {
            w: m.w.iter().map(|row| row.iter().map(&even).collect()).collect::<Result<_>>()?,
            h_inverse: m.h_inverse.iter().map(|row| row.iter().map(&even).collect()).collect::<Result<_>>()?,
            clifford_flat: m.clifford_flat.iter().map(&odd).collect::<Result<_>>()?,
            connection: m.connection.iter().map(&even).collect::<Result<_>>()?,
        }),
    };
    let mut metadata = triple.metadata.clone();
    metadata.insert("doubled".into(), "H⊗ℂ² graded by 1⊗diag(1,−1), D⊗ω, η⊗ω".into());
    Ok(EquivariantTriple {
        label: triple.label.clone(),
        dirac: odd(&triple.dirac)?,
        eta: triple.eta.iter().map(&odd).collect::<Result<_>>()?,
        generators: triple.generators.iter().map(&even).collect::<Result<_>>()?,
        metric,
        geometry: triple.geometry.clone(),
        orbit: triple.orbit.clone(),
        fixed_point_samples: triple.fixed_point_samples.iter().map(&sample).collect::<Result<_>>()?,
        algebra_samples: triple.algebra_samples.iter().map(&sample).collect::<Result<_>>()?,
        grid: triple.grid.clone(),
        metadata,
        space,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::graded_commutator;
    use crate::spectral::hermitian_eigenvalues;

    #[test]
    fn scalar_doubles_to_plus_minus() {
        let d = GradedMatrix::square(1, 0, SparseMatrix::from_real_diagonal(&[3.5]), Parity::Even).unwrap();
        let dd = double_block(&d, true).unwrap();
        assert_eq!(dd.parity(), Parity::Odd);
        let ev = hermitian_eigenvalues(dd.entries());
        assert!((ev[0] + 3.5).abs() < 1e-14 && (ev[1] - 3.5).abs() < 1e-14);
    }

    #[test]
    fn doubled_operator_graded_commutes_with_cl1() {
        let d = GradedMatrix::square(2, 0, SparseMatrix::from_real_diagonal(&[1.0, -2.0]), Parity::Even).unwrap();
        let dd = double_block(&d, true).unwrap();
        let c = graded_tensor(&GradedMatrix::identity(2, 0), &flip());
        assert_eq!(graded_commutator(&dd, &c).unwrap().entries().max_abs(), 0.0);
        let g = GradedMatrix::grading(2, 2);
        let anti = dd.entries().matmul(g.entries()).unwrap().add(&g.entries().matmul(dd.entries()).unwrap()).unwrap();
        assert_eq!(anti.max_abs(), 0.0);
    }

    #[test]
    fn graded_input_rejected() {
        assert!(double_block(&omega(), true).is_err());
    }
}
