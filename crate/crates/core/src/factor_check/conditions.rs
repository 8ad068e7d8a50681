use alloc::string::String;
use alloc::vec::Vec;

use super::{banded, EtaData, Verdict};
use crate::error::{Error, Result};
use crate::graded_core::graded_commutator;
use crate::models::{AlgebraSample, EquivariantModel, EquivariantTriple};
use crate::sectors::{graded_commutator_sector, Character};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Condition1Outcome {
    pub verdict: Verdict,
    /// max over generators and samples of ‖[E_j, a]±‖
    pub max_violation: f64,
    pub samples_checked: usize,
}

/// [η(s), a]± = 0 for fixed-point samples a.
pub fn check_condition1(eta: &EtaData, samples: &[AlgebraSample], tolerance: f64) -> Result<Condition1Outcome> {
    let zero = Character::zero(eta.zeta.n());
    let mut worst: f64 = 0.0;
    for s in samples {
        if s.op.shifts().iter().any(|m| *m != zero) {
            return Err(Error::Precondition(alloc::format!("sample {} is not shift-0", s.label)));
        }
        for e in &eta.generators {
            worst = worst.max(graded_commutator_sector(e, &s.op)?.operator_norm().value);
        }
    }
    Ok(Condition1Outcome {
        verdict: if worst <= tolerance { Verdict::Pass } else { Verdict::Fail },
        max_violation: worst,
        samples_checked: samples.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Condition2Row {
    pub sample: String,
    pub shift: Character,
    pub generator: usize,
    /// ‖[D, E_j]± a P_ζ‖ at each refinement level
    pub norms: Vec<f64>,
    pub ratio: f64,
    pub analytic: Option<f64>,
    pub analytic_relative_error: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Condition2Outcome {
    pub verdict: Verdict,
    pub rows: Vec<Condition2Row>,
    pub worst_ratio: f64,
    /// Samples whose target sector ζ + μ leaves the window.
    pub skipped_samples: usize,
}

/// ‖[D, E_j]± a P_ζ‖, or `None` when a moves ζ out of the window.
pub fn condition2_probe(triple: &EquivariantTriple, sample: &AlgebraSample, generator: usize, zeta: &Character) -> Result<Option<f64>> {
    let Some(a) = sample.op.block(&sample.shift, zeta) else {
        return Ok(None);
    };
    let target = zeta.add(&sample.shift);
    let d = triple.dirac.restrict_to_sector(&target)?;
    let e = triple.eta[generator].restrict_to_sector(&target)?;
    Ok(Some(graded_commutator(&d, &e)?.mul(a)?.norm()))
}

fn compactly_supported(triple: &EquivariantTriple, sample: &AlgebraSample) -> bool {
    match triple.grid.as_ref().and_then(|g| g.margin) {
        // open orbit space: the sample has to vanish near both ends
        Some(_) => sample.bump.is_some_and(|b| {
            let (lo, hi) = b.support();
            lo > 0.0 && hi < core::f64::consts::PI
        }),
        None => true,
    }
}

/// [D, η(s)]± a P_ζ bounded, judged by stability of the norm under
/// refinement and, where the model has one, by its closed form.
pub fn check_condition2<M: EquivariantModel>(
    levels: &[M],
    zeta: &Character,
    band: f64,
    analytic_tolerance: f64,
) -> Result<Condition2Outcome> {
    if levels.len() < 2 {
        return Err(Error::Config("condition 2 needs at least one refinement".into()));
    }
    let base = levels[0].triple();
    let finest = levels.last().expect("non-empty");
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (i, sample) in base.algebra_samples.iter().enumerate() {
        if !compactly_supported(base, sample) {
            return Err(Error::Precondition(alloc::format!("sample {} is not compactly supported", sample.label)));
        }
        for g in 0..base.eta.len() {
            let mut norms = Vec::with_capacity(levels.len());
            for m in levels {
                let t = m.triple();
                let s = t
                    .algebra_samples
                    .get(i)
                    .ok_or_else(|| Error::Input("refined model has fewer samples".into()))?;
                if let Some(v) = condition2_probe(t, s, g, zeta)? {
                    norms.push(v);
                }
            }
            if norms.len() != levels.len() {
                skipped += 1;
                continue;
            }
            let (prev, last) = (norms[norms.len() - 2], norms[norms.len() - 1]);
            let ratio = if prev == 0.0 && last == 0.0 { 1.0 } else { last / prev };
            let mut verdict = banded((ratio - 1.0).abs(), band);
            let fine_sample = &finest.triple().algebra_samples[i];
            let analytic = finest.analytic_condition2(fine_sample, zeta, g);
            let analytic_relative_error = analytic.map(|a| if a > 0.0 { (last - a).abs() / a } else { last.abs() });
            if let Some(err) = analytic_relative_error {
                if err > analytic_tolerance && verdict == Verdict::Pass {
                    verdict = Verdict::Inconclusive;
                }
            }
            rows.push(Condition2Row {
                sample: sample.label.clone(),
                shift: sample.shift.clone(),
                generator: g,
                norms,
                ratio,
                analytic,
                analytic_relative_error,
                verdict,
            });
        }
    }
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(1.0_f64, |w, r| if (r - 1.0).abs() > (w - 1.0).abs() { r } else { w });
    Ok(Condition2Outcome {
        verdict: Verdict::all(rows.iter().map(|r| r.verdict)),
        rows,
        worst_ratio,
        skipped_samples: skipped,
    })
}
