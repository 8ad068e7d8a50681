use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::odd::double_odd;
use super::{constant_diagonal, constant_shift, cplx, generator_ops, small_characters};
use super::{AlgebraSample, EquivariantModel, EquivariantTriple, GeometrySummary, MetricData};
use crate::error::{Error, Result};
use crate::factor_check::OrbitSpaceModel;
use crate::graded_core::{spinor_rep, GradedMatrix, Parity, SpinorRep};
use crate::sectors::{SectorOperator, SectorSpace, TruncationWindow};

/// Flat spin torus Tⁿ = Rⁿ/Zⁿ acting on itself; D_k = 2π Σ_j k_j Γ_j.
///
/// Odd n gives an ungraded spinor bundle, which is doubled.
#[derive(Clone, Debug)]
pub struct TorusDiracModel {
    n: usize,
    window: TruncationWindow,
    rep: SpinorRep,
    triple: EquivariantTriple,
}

impl TorusDiracModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    pub fn rep(&self) -> &SpinorRep {
        &self.rep
    }

    pub fn dirac(&self) -> &SectorOperator {
        &self.triple.dirac
    }
}

impl EquivariantModel for TorusDiracModel {
    fn triple(&self) -> &EquivariantTriple {
        &self.triple
    }

    fn refined(&self) -> Result<Self> {
        Ok(self.clone())
    }
}

pub fn build_torus(n: usize, k_max: i64) -> Result<TorusDiracModel> {
    if n == 0 {
        return Err(Error::Config("torus dimension must be at least 1".into()));
    }
    if k_max < 1 {
        return Err(Error::Config(format!("window K = {k_max} must be at least 1")));
    }
    let window = TruncationWindow::new(n, k_max)?;
    let rep = spinor_rep(n);
    let d = rep.dim();
    let graded = rep.is_graded();
    let dims = if graded { (d / 2, d / 2) } else { (d, 0) };
    let space = SectorSpace::uniform(window, dims);
    let gamma = rep.gamma();

    let dirac = SectorOperator::diagonal(&space, gamma[0].parity(), |k| {
        let mut acc = GradedMatrix::zero(dims, dims, gamma[0].parity());
        for (j, g) in gamma.iter().enumerate() {
            acc = acc.add(&g.scale_real(2.0 * PI * k.0[j] as f64))?;
        }
        Ok(acc)
    })?;
    let eta: Vec<SectorOperator> = gamma.iter().map(|g| constant_diagonal(&space, g)).collect::<Result<_>>()?;
    let one = GradedMatrix::identity(dims.0, dims.1);
    let identity = constant_diagonal(&space, &one)?;
    let zero = SectorOperator::zero(&space, Parity::Even);
    let w: Vec<Vec<SectorOperator>> = (0..n)
        .map(|r| (0..n).map(|j| if r == j { identity.clone() } else { zero.clone() }).collect())
        .collect();
    let clifford_flat = gamma
        .iter()
        .map(|g| constant_diagonal(&space, &g.scale(cplx(0.0, 1.0))))
        .collect::<Result<_>>()?;
    let generators = generator_ops(&space)?;
    let connection = generators.iter().map(|a| a.scale(cplx(0.0, -1.0))).collect();

    let mut orbit = OrbitSpaceModel::point();
    for k in window.characters() {
        orbit.set_full_support(k);
    }
    let fixed_point_samples = alloc::vec![AlgebraSample {
        label: "1".into(),
        shift: crate::sectors::Character::zero(n),
        bump: None,
        op: identity.clone(),
    }];
    let algebra_samples = small_characters(&space, 2)
        .into_iter()
        .map(|mu| {
            Ok(AlgebraSample {
                label: format!("chi{mu}"),
                op: constant_shift(&space, &mu, &one)?,
                shift: mu,
                bump: None,
            })
        })
        .collect::<Result<_>>()?;

    let mut metadata = BTreeMap::new();
    metadata.insert("dirac".into(), "D_k = 2π Σ_j k_j Γ_j, c(dtʲ) = iΓ_j".into());
    let triple = EquivariantTriple {
        label: format!("torus(n={n})"),
        dirac,
        eta,
        generators,
        metric: Some(MetricData {
            h_inverse: w.clone(),
            w,
            clifford_flat,
            connection,
        }),
        geometry: Some(GeometrySummary {
            w_min_eigenvalue: 1.0,
            w_sup_entry: 1.0,
            endomorphism_sup: alloc::vec![0.0; n],
            orbit_defect: alloc::vec![alloc::vec![0.0; n]],
        }),
        orbit,
        fixed_point_samples,
        algebra_samples,
        grid: None,
        metadata,
        space,
    };
    let triple = if graded { triple } else { double_odd(&triple)? };
    Ok(TorusDiracModel { n, window, rep, triple })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectors::{graded_commutator_sector, Character};
    use crate::spectral::hermitian_eigenvalues;

    #[test]
    fn circle_sector_spectra() {
        let t = build_torus(1, 3).unwrap();
        for m in -3i64..=3 {
            let b = t.dirac().restrict_to_sector(&Character::new(&[m])).unwrap();
            let ev = hermitian_eigenvalues(b.entries());
            let want = 2.0 * PI * m.abs() as f64;
            assert!((ev[0] + want).abs() < 1e-12 && (ev[1] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_sections_are_harmonic() {
        for n in 1..=4 {
            let t = build_torus(n, 2).unwrap();
            let b = t.dirac().restrict_to_sector(&Character::zero(n)).unwrap();
            assert_eq!(b.entries().max_abs(), 0.0);
        }
    }

    #[test]
    fn commutator_with_character() {
        // χ_1 = e^{2πit} lowers the sector label by one
        let t = build_torus(1, 4).unwrap();
        let space = t.triple().space.clone();
        let (e, o) = space.block_dims(&Character::new(&[0])).unwrap();
        let chi = constant_shift(&space, &Character::new(&[-1]), &GradedMatrix::identity(e, o)).unwrap();
        let comm = graded_commutator_sector(t.dirac(), &chi).unwrap();
        for k in -2i64..=2 {
            let b = comm.block(&Character::new(&[-1]), &Character::new(&[k])).unwrap();
            assert!((b.norm() - 2.0 * PI).abs() < 1e-12);
        }
    }
}
