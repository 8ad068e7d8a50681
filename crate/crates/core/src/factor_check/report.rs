use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    check_condition1, check_condition2, check_ssa, constructive_product, lower_bound_certificate, positivity_scan, Certificate,
    CertificateCheck, Condition1Outcome, Condition2Outcome, EtaData, EtaDiagnostics, GapReport, PositivityOutcome, SsaOutcome,
    Verdict,
};
use crate::error::{Error, Result};
use crate::models::{EquivariantModel, GridInfo};
use crate::sectors::Character;

/// Which checks to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CheckSet {
    pub ssa: bool,
    pub condition1: bool,
    pub condition2: bool,
    pub positivity: bool,
    pub certificate: bool,
    pub product_gap: bool,
}

impl CheckSet {
    pub fn full() -> Self {
        CheckSet {
            ssa: true,
            condition1: true,
            condition2: true,
            positivity: true,
            certificate: true,
            product_gap: true,
        }
    }

    pub fn none() -> Self {
        CheckSet {
            ssa: false,
            condition1: false,
            condition2: false,
            positivity: false,
            certificate: false,
            product_gap: false,
        }
    }

    /// All four conditions entering the factorisation verdict are requested.
    pub fn decides_factorisation(&self) -> bool {
        self.ssa && self.condition1 && self.condition2 && self.positivity
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CheckOptions {
    /// Number of grid refinements beyond the base model (at least 1).
    pub refinements: usize,
    pub stability_band: f64,
    pub condition2_band: f64,
    pub analytic_tolerance: f64,
    pub condition1_tolerance: f64,
    pub certificate_tolerance: f64,
    pub checks: CheckSet,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            refinements: 1,
            stability_band: 0.05,
            condition2_band: 0.1,
            analytic_tolerance: 0.02,
            condition1_tolerance: 1e-10,
            certificate_tolerance: 1e-6,
            checks: CheckSet::full(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CheckReport {
    pub model: String,
    pub ell: Character,
    pub rank: usize,
    pub window: i64,
    pub grid: Option<GridInfo>,
    pub options: CheckOptions,
    pub metadata: BTreeMap<String, String>,
    pub samples: String,
    pub truncation_losses: BTreeMap<String, usize>,
    pub ssa: Option<SsaOutcome>,
    pub eta: Option<EtaDiagnostics>,
    pub condition1: Option<Condition1Outcome>,
    pub condition2: Option<Condition2Outcome>,
    pub positivity: Option<PositivityOutcome>,
    pub certificate: Option<Certificate>,
    pub certificate_check: Option<CertificateCheck>,
    pub product_gap: Option<GapReport>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// SSA ∧ condition 1 ∧ condition 2 ∧ positivity
    pub factorises: Verdict,
}

impl CheckReport {
    /// True when no requested check came out inconclusive.
    pub fn conclusive(&self) -> bool {
        self.verdicts.values().all(|v| v.is_conclusive()) && self.factorises.is_conclusive()
    }

    /// Every numeric diagnostic, labelled, in a fixed order.
    pub fn scalar_diagnostics(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        if let Some(e) = &self.eta {
            out.push(("eta.self_adjoint_defect".into(), e.self_adjoint_defect));
            out.push(("eta.clifford_defect".into(), e.clifford_defect));
        }
        if let Some(c) = &self.condition1 {
            out.push(("condition1.max_violation".into(), c.max_violation));
        }
        if let Some(c) = &self.condition2 {
            for (i, r) in c.rows.iter().enumerate() {
                for (l, v) in r.norms.iter().enumerate() {
                    out.push((format!("condition2.{i}.{}.norm{l}", r.generator), *v));
                }
            }
        }
        if let Some(p) = &self.positivity {
            for (l, v) in p.infima.iter().enumerate() {
                out.push((format!("positivity.inf{l}"), *v));
            }
            for s in &p.sectors {
                for (l, v) in s.minima.iter().enumerate() {
                    out.push((format!("positivity.{}.min{l}", s.character), *v));
                }
            }
        }
        if let Some(c) = &self.certificate {
            out.extend([("certificate.a".into(), c.a), ("certificate.b".into(), c.b), ("certificate.d".into(), c.d), ("certificate.r".into(), c.r)]);
        }
        if let Some(g) = &self.product_gap {
            out.push(("product_gap.slope".into(), g.slope));
            for r in &g.rows {
                out.push((format!("product_gap.{}", r.character), r.gap));
            }
        }
        out
    }
}

/// Runs the requested checks on the model and `refinements` refinements of it.
///
/// A failing SSA short-circuits everything else.
pub fn run_full_check<M: EquivariantModel + Clone>(model: &M, ell: &Character, options: &CheckOptions) -> Result<CheckReport> {
    if options.refinements < 1 {
        return Err(Error::Config("at least one refinement is required".into()));
    }
    let t = model.triple();
    t.space.window().require(ell)?;
    let checks = options.checks;
    let mut verdicts = BTreeMap::new();
    let mut truncation_losses = BTreeMap::new();
    truncation_losses.insert("dirac".into(), t.dirac.truncation_loss());
    truncation_losses.insert("algebra_samples".into(), t.algebra_samples.iter().map(|s| s.op.truncation_loss()).sum());
    let mut report = CheckReport {
        model: t.label.clone(),
        ell: ell.clone(),
        rank: t.rank(),
        window: t.space.window().k_max(),
        grid: t.grid.clone(),
        options: *options,
        metadata: t.metadata.clone(),
        samples: format!(
            "{} fixed-point samples, {} algebra samples (bumps × characters |χ| ≤ 2)",
            t.fixed_point_samples.len(),
            t.algebra_samples.len()
        ),
        truncation_losses,
        ssa: None,
        eta: None,
        condition1: None,
        condition2: None,
        positivity: None,
        certificate: None,
        certificate_check: None,
        product_gap: None,
        verdicts: BTreeMap::new(),
        factorises: Verdict::Skipped,
    };

    if checks.ssa {
        let ssa = check_ssa(&t.orbit)?;
        verdicts.insert("ssa".into(), ssa.verdict);
        let failed = ssa.verdict == Verdict::Fail;
        report.ssa = Some(ssa);
        if failed {
            for name in ["condition1", "condition2", "positivity", "certificate", "product_gap"] {
                verdicts.insert(name.into(), Verdict::Skipped);
            }
            report.verdicts = verdicts;
            report.factorises = Verdict::Fail;
            return Ok(report);
        }
    }

    let eta = EtaData::from_triple(t, ell)?;
    report.eta = Some(eta.diagnostics()?);
    let needs_levels = checks.condition2 || checks.positivity || checks.certificate;
    let mut levels = Vec::new();
    if needs_levels {
        levels.push(model.clone());
        for _ in 0..options.refinements {
            let next = levels.last().expect("non-empty").refined()?;
            levels.push(next);
        }
    }

    if checks.condition1 {
        let c1 = check_condition1(&eta, &t.fixed_point_samples, options.condition1_tolerance)?;
        verdicts.insert("condition1".into(), c1.verdict);
        report.condition1 = Some(c1);
    }
    if checks.condition2 {
        let c2 = check_condition2(&levels, ell, options.condition2_band, options.analytic_tolerance)?;
        verdicts.insert("condition2".into(), c2.verdict);
        report.condition2 = Some(c2);
    }
    if checks.positivity || checks.certificate {
        let pos = positivity_scan(&levels, ell, options.stability_band)?;
        if checks.certificate {
            match &levels.last().expect("non-empty").triple().geometry {
                Some(g) => {
                    let cert = lower_bound_certificate(g, ell, t.space.window());
                    let check = cert.validate(&pos, options.certificate_tolerance);
                    verdicts.insert("certificate".into(), if check.valid { Verdict::Pass } else { Verdict::Fail });
                    report.certificate = Some(cert);
                    report.certificate_check = Some(check);
                }
                None => {
                    verdicts.insert("certificate".into(), Verdict::Skipped);
                }
            }
        }
        if checks.positivity {
            verdicts.insert("positivity".into(), pos.verdict);
            report.positivity = Some(pos);
        }
    }
    if checks.product_gap {
        if t.geometry.is_some() {
            let gap = constructive_product(t, ell)?.gap;
            let v = match gap.slope_relative_error {
                Some(e) if e > 0.1 => Verdict::Inconclusive,
                _ => Verdict::Pass,
            };
            verdicts.insert("product_gap".into(), v);
            report.product_gap = Some(gap);
        } else {
            verdicts.insert("product_gap".into(), Verdict::Skipped);
        }
    }

    report.factorises = if checks.decides_factorisation() {
        Verdict::all(["ssa", "condition1", "condition2", "positivity"].iter().map(|k| verdicts[*k]))
    } else {
        Verdict::Skipped
    };
    report.verdicts = verdicts;
    Ok(report)
}
