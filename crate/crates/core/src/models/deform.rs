use alloc::format;
use alloc::vec::Vec;

use super::nc_torus::{apply_monomial, ThetaMatrix};
use super::{AlgebraSample, EquivariantModel, EquivariantTriple, MetricData};
use crate::error::{Error, Result};
use crate::graded_core::{GradedMatrix, Parity};
use crate::sectors::{Character, SectorOperator};

/// θ-deformation of an equivariant triple, realised on the span of ξ_k ⊗ δ_{−k}
/// inside H ⊗ ℓ²(Zⁿ), which is identified with H again.
///
/// The intertwiner u(ξ_k) = ξ_k ⊗ U^{−k} becomes the phase of U^{−k}δ_0 on
/// sector k, and a ↦ a ⊗ U^{−μ} on A_μ becomes a phase-twisted copy of a.
#[derive(Clone, Debug)]
pub struct DeformedModel<M> {
    base: M,
    theta: ThetaMatrix,
    u: SectorOperator,
    triple: EquivariantTriple,
}

impl<M> DeformedModel<M> {
    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn theta(&self) -> &ThetaMatrix {
        &self.theta
    }

    /// The diagonal phase unitary u.
    pub fn intertwiner(&self) -> &SectorOperator {
        &self.u
    }
}

impl<M: EquivariantModel + Clone> EquivariantModel for DeformedModel<M> {
    fn triple(&self) -> &EquivariantTriple {
        &self.triple
    }

    fn refined(&self) -> Result<Self> {
        deform(self.base.refined()?, &self.theta)
    }

    fn analytic_condition2(&self, sample: &AlgebraSample, zeta: &Character, generator: usize) -> Option<f64> {
        self.base.analytic_condition2(sample, zeta, generator)
    }
}

pub fn deform<M: EquivariantModel + Clone>(base: M, theta: &ThetaMatrix) -> Result<DeformedModel<M>> {
    let t = base.triple();
    let n = t.rank();
    if theta.n() != n {
        return Err(Error::Input(format!("theta is {}×{} but the torus has rank {n}", theta.n(), theta.n())));
    }
    let space = t.space.clone();
    let u = SectorOperator::diagonal(&space, Parity::Even, |k| {
        let (turn, _) = apply_monomial(theta, &k.neg(), &Character::zero(n))?;
        let (e, o) = space.block_dims(k)?;
        Ok(GradedMatrix::identity(e, o).scale(turn.phase()))
    })?;
    let u_star = u.adjoint();
    let conj = |op: &SectorOperator| -> Result<SectorOperator> { u.compose(op)?.compose(&u_star) };
    let twist = |s: &AlgebraSample| -> Result<AlgebraSample> {
        let minus_mu = s.shift.neg();
        let op = s.op.map_blocks(|_, source, b| {
            let (turn, _) = apply_monomial(theta, &minus_mu, &source.neg()).expect("rank checked above");
            b.scale(turn.phase())
        });
        Ok(AlgebraSample {
            label: format!("ψ({})", s.label),
            op,
            ..s.clone()
        })
    };
    let metric = match &t.metric {
        None => None,
        Some(m) => Some(MetricData {
            w: m.w.iter().map(|row| row.iter().map(&conj).collect()).collect::<Result<_>>()?,
            h_inverse: m.h_inverse.iter().map(|row| row.iter().map(&conj).collect()).collect::<Result<_>>()?,
            clifford_flat: m.clifford_flat.iter().map(&conj).collect::<Result<_>>()?,
            connection: m.connection.iter().map(&conj).collect::<Result<_>>()?,
        }),
    };
    let mut metadata = t.metadata.clone();
    metadata.insert(
        "theta".into(),
        (0..n)
            .map(|j| (0..n).map(|k| format!("{}", theta.get(j, k))).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("; "),
    );
    let triple = EquivariantTriple {
        label: format!("{} deformed", t.label),
        space: space.clone(),
        dirac: conj(&t.dirac)?,
        eta: t.eta.iter().map(&conj).collect::<Result<_>>()?,
        generators: t.generators.iter().map(&conj).collect::<Result<_>>()?,
        metric,
        geometry: t.geometry.clone(),
        orbit: t.orbit.clone(),
        fixed_point_samples: t.fixed_point_samples.iter().map(&twist).collect::<Result<_>>()?,
        algebra_samples: t.algebra_samples.iter().map(&twist).collect::<Result<_>>()?,
        grid: t.grid.clone(),
        metadata,
    };
    Ok(DeformedModel {
        theta: theta.clone(),
        u,
        triple,
        base,
    })
}

#[cfg(test)]
mod tests {
    use super::super::nc_torus::Turn;
    use super::super::{build_torus, EquivariantModel};
    use super::*;

    #[test]
    fn zero_theta_is_identity() {
        let base = build_torus(2, 2).unwrap();
        let d = deform(base.clone(), &ThetaMatrix::zero(2)).unwrap();
        for (_, _, b) in d.intertwiner().blocks() {
            let (e, o) = (b.even_dim(), b.odd_dim());
            assert!(b.max_abs_diff(&GradedMatrix::identity(e, o)) < 1e-15);
        }
        let diff = d.triple().dirac.sub(&base.triple().dirac).unwrap();
        assert_eq!(diff.operator_norm().value, 0.0);
    }

    #[test]
    fn deformed_samples_twist() {
        let base = build_torus(2, 3).unwrap();
        let d = deform(base, &ThetaMatrix::two(Turn::exact(1, 4).unwrap()).unwrap()).unwrap();
        let t = d.triple();
        let a = t.algebra_samples.iter().find(|s| s.shift == Character::new(&[1, 0])).unwrap();
        let b = t.algebra_samples.iter().find(|s| s.shift == Character::new(&[0, 1])).unwrap();
        let ab = a.op.compose(&b.op).unwrap();
        let ba = b.op.compose(&a.op).unwrap();
        let shift = Character::new(&[1, 1]);
        let src = Character::zero(2);
        let x = ab.block(&shift, &src).unwrap().entries().get(0, 0);
        let y = ba.block(&shift, &src).unwrap().entries().get(0, 0);
        assert!(((x / y).arg().abs() - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
