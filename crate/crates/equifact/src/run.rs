use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use equifact_core::factor_check::{run_full_check, CheckOptions, CheckReport, Verdict};
use equifact_core::models::{
    build_nc_torus, build_sphere, build_torus, build_warped_torus, deform, EquivariantModel, Profile, RelationCheck,
    WarpedTorusConfig,
};
use equifact_core::sectors::Character;
use serde::Serialize;

use crate::canonical::{to_canonical_json, SCHEMA_VERSION};
use crate::scenario::{ModelKind, Scenario};
use crate::table::render_text;
use crate::CliError;

/// Echo of the validated scenario as it was run.
#[derive(Debug, Serialize)]
pub struct ScenarioSummary {
    pub model: ModelKind,
    pub rank: usize,
    #[serde(rename = "K")]
    pub window: i64,
    #[serde(rename = "N")]
    pub grid: Option<usize>,
    pub k_lift: Option<i64>,
    pub margin: Option<f64>,
    pub poles: Option<bool>,
    pub profile: Option<Profile>,
    pub theta_matrix: Option<Vec<Vec<String>>>,
    pub checks: Vec<String>,
    pub l_range: (i64, i64),
    pub ell_tail: Vec<i64>,
    pub refinements: usize,
}

/// One ℓ of the scan, with the sphere's case analysis alongside.
#[derive(Debug, Serialize)]
pub struct ScanRow {
    pub ell: Character,
    pub k_minus_ell: Option<i64>,
    pub parity: Option<&'static str>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub factorises: Verdict,
    /// min over integer n of 4πn(n − k + ℓ + 1/2)
    pub p_min: Option<f64>,
    /// smallest eigenvalue of [D, M] over all sectors at the finest level
    pub inf_lambda: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Document {
    pub schema_version: u32,
    pub scenario: ScenarioSummary,
    pub reports: Vec<CheckReport>,
    pub scan: Vec<ScanRow>,
    pub relations: Option<Vec<RelationCheck>>,
    pub conclusive: bool,
}

pub struct RunOutcome {
    pub document: Document,
    pub json: String,
    pub text: String,
    pub out_dir: PathBuf,
    pub exit_code: u8,
}

/// Exact minimum of 4πn(n − d + 1/2) over the integers, d = k − ℓ.
pub fn sphere_p_min(d: i64) -> f64 {
    let reach = d.abs() + 2;
    (-reach..=reach)
        .map(|n| 4.0 * std::f64::consts::PI * n as f64 * (n as f64 - d as f64 + 0.5))
        .fold(f64::INFINITY, f64::min)
        + 0.0
}

fn run_levels<M: EquivariantModel + Clone>(
    model: &M,
    ells: &[Character],
    options: &CheckOptions,
    log: &mut Vec<String>,
) -> Result<Vec<CheckReport>, CliError> {
    ells.iter()
        .map(|ell| {
            let start = Instant::now();
            let report = run_full_check(model, ell, options)?;
            log.push(format!("ℓ = {ell}: {} in {:.3}s", report.factorises.as_str(), start.elapsed().as_secs_f64()));
            Ok(report)
        })
        .collect()
}

fn warped_config(s: &Scenario) -> WarpedTorusConfig {
    let mut profiles = vec![s.profile.clone().unwrap_or(Profile::constant(1.0))];
    profiles.extend((1..s.rank).map(|_| Profile::constant(1.0)));
    WarpedTorusConfig {
        profiles,
        n_grid: s.grid.expect("validated"),
        window: s.window,
    }
}

fn summary(s: &Scenario) -> ScenarioSummary {
    ScenarioSummary {
        model: s.model,
        rank: s.rank,
        window: s.window,
        grid: s.grid,
        k_lift: s.sphere.map(|c| c.k_lift),
        margin: s.sphere.map(|c| c.margin),
        poles: s.sphere.map(|c| c.poles),
        profile: s.profile.clone(),
        theta_matrix: s.theta.as_ref().map(|t| {
            (0..t.n()).map(|j| (0..t.n()).map(|k| t.get(j, k).to_string()).collect()).collect()
        }),
        checks: s.check_names.clone(),
        l_range: s.l_range,
        ell_tail: s.ell_tail.clone(),
        refinements: s.refinements,
    }
}

/// Runs every ℓ in the scenario and renders the canonical JSON and text table.
pub fn execute(scenario: &Scenario, log: &mut Vec<String>) -> Result<(Document, String, String), CliError> {
    let options = CheckOptions {
        refinements: scenario.refinements,
        stability_band: scenario.stability_band,
        condition2_band: scenario.condition2_band,
        analytic_tolerance: scenario.analytic_tolerance,
        checks: scenario.checks,
        ..CheckOptions::default()
    };
    let ells = scenario.ells();
    let build = Instant::now();
    let mut relations = None;
    let reports = match scenario.model {
        ModelKind::Torus => {
            let m = build_torus(scenario.rank, scenario.window)?;
            log.push(format!("built torus in {:.3}s", build.elapsed().as_secs_f64()));
            run_levels(&m, &ells, &options, log)?
        }
        ModelKind::WarpedTorus => {
            let m = build_warped_torus(warped_config(scenario))?;
            log.push(format!("built warped torus in {:.3}s", build.elapsed().as_secs_f64()));
            run_levels(&m, &ells, &options, log)?
        }
        ModelKind::Sphere => {
            let m = build_sphere(scenario.sphere.expect("validated"))?;
            log.push(format!("built sphere in {:.3}s", build.elapsed().as_secs_f64()));
            run_levels(&m, &ells, &options, log)?
        }
        ModelKind::NcTorus => {
            let theta = scenario.theta.as_ref().expect("validated");
            let m = deform(build_warped_torus(warped_config(scenario))?, theta)?;
            log.push(format!("built θ-deformed warped torus in {:.3}s", build.elapsed().as_secs_f64()));
            let gens = build_nc_torus(scenario.rank, theta, scenario.window)?;
            let mut rel = Vec::new();
            for j in 0..scenario.rank {
                for k in j + 1..scenario.rank {
                    rel.push(gens.relation(j, k)?);
                }
            }
            relations = Some(rel);
            run_levels(&m, &ells, &options, log)?
        }
    };

    let scan = reports
        .iter()
        .map(|r| {
            let d = scenario.sphere.map(|c| c.k_lift - r.ell.0[0]);
            ScanRow {
                ell: r.ell.clone(),
                k_minus_ell: d,
                parity: d.map(|d| if d.rem_euclid(2) == 0 { "even" } else { "odd" }),
                verdicts: r.verdicts.clone(),
                factorises: r.factorises,
                p_min: d.map(sphere_p_min),
                inf_lambda: r.positivity.as_ref().and_then(|p| p.infima.last().copied()),
            }
        })
        .collect();
    let relations_hold = relations.as_ref().is_none_or(|rs: &Vec<RelationCheck>| rs.iter().all(|r| r.holds));
    let conclusive = reports.iter().all(|r| r.conclusive());
    if !relations_hold {
        log.push("NC-torus relations do not hold".into());
    }
    let document = Document {
        schema_version: SCHEMA_VERSION,
        scenario: summary(scenario),
        reports,
        scan,
        relations,
        conclusive,
    };
    let json = to_canonical_json(&document)?;
    let text = render_text(&document);
    Ok((document, json, text))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a scenario and writes report.json, report.txt and run.log into `out_dir`.
pub fn run(scenario: &Scenario, source: &Path, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let started = time::OffsetDateTime::now_utc();
    let clock = Instant::now();
    let mut log = vec![
        format!("started {}", started.format(&time::format_description::well_known::Rfc3339).unwrap_or_default()),
        format!("scenario {}", source.display()),
        format!("equifact {}", env!("CARGO_PKG_VERSION")),
    ];
    let result = execute(scenario, &mut log);
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let (document, json, text) = match result {
        Ok(x) => x,
        Err(e) => {
            log.push(format!("error: {e}"));
            write(&out_dir.join("run.log"), &(log.join("\n") + "\n"))?;
            return Err(e);
        }
    };
    let exit_code = if document.conclusive { 0 } else { 2 };
    write(&out_dir.join("report.json"), &json)?;
    write(&out_dir.join("report.txt"), &text)?;
    log.push(format!("finished in {:.3}s, exit code {exit_code}", clock.elapsed().as_secs_f64()));
    write(&out_dir.join("run.log"), &(log.join("\n") + "\n"))?;
    Ok(RunOutcome {
        document,
        json,
        text,
        out_dir: out_dir.to_path_buf(),
        exit_code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_min_vanishes_only_for_k_and_k_minus_one() {
        for d in -4..=4 {
            assert_eq!(sphere_p_min(d) >= 0.0, d == 0 || d == 1, "d = {d}");
        }
    }
}
