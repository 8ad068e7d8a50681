use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::{banded, EtaData, Verdict};
use crate::error::{Error, Result};
use crate::graded_core::{graded_commutator, GradedMatrix};
use crate::models::{EquivariantModel, EquivariantTriple};
use crate::sectors::{Character, SectorOperator};
use crate::spectral;

/// M = Σ_j E_j (A_j − 2πζ_j), block 2π Σ_j (m_j − ζ_j) E_j on sector m.
pub fn product_operator(triple: &EquivariantTriple, eta: &EtaData) -> Result<SectorOperator> {
    let parity = eta.generators[0].parity();
    SectorOperator::diagonal(&triple.space, parity, |m| {
        let (e, o) = triple.space.block_dims(m)?;
        let mut acc = GradedMatrix::zero((e, o), (e, o), parity);
        for (j, gen) in eta.generators.iter().enumerate() {
            let w = 2.0 * PI * (m.0[j] - eta.zeta.0[j]) as f64;
            if w != 0.0 {
                acc = acc.add(&gen.restrict_to_sector(m)?.scale_real(w))?;
            }
        }
        Ok(acc)
    })
}

/// M = −i Σ_{r,j} W^{rj} c(X_r♭)(A_j − 2πℓ_j), assembled from the metric data.
pub fn product_operator_from_metric(triple: &EquivariantTriple, ell: &Character) -> Result<SectorOperator> {
    let metric = triple.metric.as_ref().ok_or(Error::MissingMetric)?;
    let n = triple.rank();
    let id = SectorOperator::identity(&triple.space);
    let mut acc: Option<SectorOperator> = None;
    for j in 0..n {
        let shifted = triple.generators[j].sub(&id.scale_real(2.0 * PI * ell.0[j] as f64))?;
        for r in 0..n {
            let term = metric.w[r][j].compose(&metric.clifford_flat[r])?.compose(&shifted)?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
    }
    Ok(acc.expect("rank ≥ 1").scale(Complex64::new(0.0, -1.0)))
}

/// ⟨Dξ, Mξ⟩ + ⟨Mξ, Dξ⟩ for one sector block.
pub fn quadratic_form(d: &GradedMatrix, m: &GradedMatrix, xi: &[Complex64]) -> f64 {
    let dx = d.entries().mul_vec(xi);
    let mx = m.entries().mul_vec(xi);
    2.0 * dx.iter().zip(&mx).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SectorMinimum {
    pub character: Character,
    /// λ_min of {D, M} on the sector at each refinement level
    pub minima: Vec<f64>,
    /// λ_R/λ_{R−1} for sectors whose minimum is negative and growing
    pub divergence_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PositivityOutcome {
    pub verdict: Verdict,
    pub ell: Character,
    /// inf over sectors at each level
    pub infima: Vec<f64>,
    /// |inf_R − inf_{R−1}| / max(|inf_{R−1}|, 1)
    pub change: f64,
    pub witness: Option<Character>,
    pub sectors: Vec<SectorMinimum>,
    pub diverging: Vec<Character>,
}

impl PositivityOutcome {
    /// Minima at the finest level, in window order.
    pub fn finest_minima(&self) -> impl Iterator<Item = (&Character, f64)> {
        self.sectors.iter().map(|s| (&s.character, *s.minima.last().expect("at least one level")))
    }
}

/// Smallest eigenvalue of {D, M} per sector at each refinement level; the
/// form is judged bounded below when its infimum is stable under refinement.
pub fn positivity_scan<M: EquivariantModel>(levels: &[M], ell: &Character, band: f64) -> Result<PositivityOutcome> {
    if levels.len() < 2 {
        return Err(Error::Config("positivity needs at least one refinement".into()));
    }
    let window = *levels[0].triple().space.window();
    if window.k_max() < 3 {
        return Err(Error::Config(alloc::format!("window K = {} too small for positivity (need K ≥ 3)", window.k_max())));
    }
    let chars = window.characters();
    let mut table: Vec<Vec<f64>> = alloc::vec![Vec::with_capacity(levels.len()); chars.len()];
    for model in levels {
        let t = model.triple();
        let eta = EtaData::from_triple(t, ell)?;
        let m_op = product_operator(t, &eta)?;
        for (i, k) in chars.iter().enumerate() {
            let d = t.dirac.restrict_to_sector(k)?;
            let m = m_op.restrict_to_sector(k)?;
            let z = graded_commutator(&d, &m)?;
            let lo = if z.entries().nnz() == 0 { 0.0 } else { spectral::hermitian_extremes(z.entries()).0 };
            table[i].push(lo);
        }
    }
    let infima: Vec<f64> = (0..levels.len())
        .map(|l| table.iter().map(|row| row[l]).fold(f64::INFINITY, f64::min))
        .collect();
    let (prev, last) = (infima[infima.len() - 2], infima[infima.len() - 1]);
    let change = (last - prev).abs() / prev.abs().max(1.0);
    let mut sectors = Vec::with_capacity(chars.len());
    let mut diverging = Vec::new();
    let mut witness = None;
    for (k, minima) in chars.into_iter().zip(table) {
        let (p, l) = (minima[minima.len() - 2], minima[minima.len() - 1]);
        let divergence_rate = if l < 0.0 && p < 0.0 && l / p > 1.0 + band { Some(l / p) } else { None };
        if divergence_rate.is_some() {
            diverging.push(k.clone());
        }
        if l == last && witness.is_none() {
            witness = Some(k.clone());
        }
        sectors.push(SectorMinimum {
            character: k,
            minima,
            divergence_rate,
        });
    }
    Ok(PositivityOutcome {
        verdict: banded(change, band),
        ell: ell.clone(),
        infima,
        change,
        witness,
        sectors,
        diverging,
    })
}
