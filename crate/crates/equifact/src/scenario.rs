//! Scenario files: a flat TOML table of typed keys.

use std::f64::consts::PI;
use std::path::PathBuf;

use equifact_core::factor_check::{CheckOptions, CheckSet};
use equifact_core::models::{Profile, SphereConfig, ThetaMatrix, Turn};
use equifact_core::sectors::Character;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    model: String,
    n: Option<usize>,
    #[serde(rename = "K")]
    window: Option<i64>,
    #[serde(rename = "N")]
    grid: Option<usize>,
    margin: Option<f64>,
    k_lift: Option<i64>,
    poles: Option<bool>,
    profile: Option<String>,
    profile_base: Option<f64>,
    profile_amplitude: Option<f64>,
    profile_frequency: Option<i64>,
    profile_center: Option<f64>,
    profile_width: Option<f64>,
    f_samples: Option<Vec<f64>>,
    theta_matrix: Option<Vec<Vec<ThetaEntry>>>,
    checks: Vec<String>,
    l_range: Option<LRange>,
    ell: Option<Vec<i64>>,
    refinements: Option<usize>,
    stability_band: Option<f64>,
    condition2_band: Option<f64>,
    analytic_tolerance: Option<f64>,
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ThetaEntry {
    Int(i64),
    Float(f64),
    Ratio(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LRange {
    Single(i64),
    Interval(Vec<i64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Torus,
    WarpedTorus,
    Sphere,
    NcTorus,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Torus => "torus",
            ModelKind::WarpedTorus => "warped_torus",
            ModelKind::Sphere => "sphere",
            ModelKind::NcTorus => "nc_torus",
        }
    }
}

/// Validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: ModelKind,
    pub rank: usize,
    pub window: i64,
    pub grid: Option<usize>,
    pub sphere: Option<SphereConfig>,
    pub profile: Option<Profile>,
    pub theta: Option<ThetaMatrix>,
    pub checks: CheckSet,
    pub check_names: Vec<String>,
    /// Inclusive range scanned in the first component of ℓ.
    pub l_range: (i64, i64),
    /// Remaining components of ℓ, fixed during the scan.
    pub ell_tail: Vec<i64>,
    pub refinements: usize,
    pub stability_band: f64,
    pub condition2_band: f64,
    pub analytic_tolerance: f64,
    pub output: Option<PathBuf>,
}

impl Scenario {
    pub fn ells(&self) -> Vec<Character> {
        (self.l_range.0..=self.l_range.1)
            .map(|l| {
                let mut v = vec![l];
                v.extend(&self.ell_tail);
                Character(v)
            })
            .collect()
    }

    /// Applies `--window`; the sphere config carries its own copy.
    pub fn set_window(&mut self, k: i64) -> Result<(), CliError> {
        if k < 2 {
            return Err(CliError::Usage(format!("--window must be at least 2, got {k}")));
        }
        self.window = k;
        if let Some(cfg) = &mut self.sphere {
            cfg.window = k;
        }
        Ok(())
    }

    pub fn set_refinements(&mut self, r: usize) -> Result<(), CliError> {
        if r == 0 {
            return Err(CliError::Usage("--refinements must be at least 1".into()));
        }
        self.refinements = r;
        Ok(())
    }
}

/// 1-based line of the first assignment to `key`, for error messages.
fn line_of(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(1, |i| i + 1)
}

fn parse_turn(entry: &ThetaEntry) -> Result<Turn, String> {
    match entry {
        ThetaEntry::Int(i) => Turn::exact(*i, 1).map_err(|e| e.to_string()),
        ThetaEntry::Float(x) => Ok(Turn::from_f64(*x)),
        ThetaEntry::Ratio(s) => {
            let (p, q) = s.split_once('/').unwrap_or((s.as_str(), "1"));
            let p: i64 = p.trim().parse().map_err(|_| format!("theta entry `{s}` is neither a number nor p/q"))?;
            let q: i64 = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            Turn::exact(p, q).map_err(|e| e.to_string())
        }
    }
}

fn parse_checks(names: &[String]) -> Result<CheckSet, String> {
    if names.is_empty() {
        return Err("checks must not be empty".into());
    }
    let mut set = CheckSet::none();
    for name in names {
        match name.as_str() {
            "full" => set = CheckSet::full(),
            "ssa" => set.ssa = true,
            "cond1" => set.condition1 = true,
            "cond2" => set.condition2 = true,
            "positivity" => set.positivity = true,
            "certificate" => set.certificate = true,
            "product_gap" => set.product_gap = true,
            other => {
                return Err(format!(
                    "unknown check `{other}` (expected ssa, cond1, cond2, positivity, certificate, product_gap, full)"
                ))
            }
        }
    }
    Ok(set)
}

fn parse_profile(raw: &RawScenario) -> Result<Profile, String> {
    if let Some(values) = &raw.f_samples {
        if raw.profile.is_some() {
            return Err("give either profile or f_samples, not both".into());
        }
        if values.len() < 2 {
            return Err("f_samples needs at least two values".into());
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
            return Err(format!("f_samples must be positive, found {v}"));
        }
        return Ok(Profile::Samples { values: values.clone() });
    }
    let name = raw.profile.as_deref().unwrap_or("constant");
    let profile = match name {
        "constant" => Profile::Constant {
            value: raw.profile_base.unwrap_or(1.0),
        },
        "sin-bump" => Profile::SinBump {
            base: raw.profile_base.unwrap_or(2.0),
            amplitude: raw.profile_amplitude.unwrap_or(1.0),
            frequency: raw.profile_frequency.unwrap_or(1),
        },
        "gaussian-bump" => Profile::GaussianBump {
            base: raw.profile_base.unwrap_or(1.0),
            amplitude: raw.profile_amplitude.unwrap_or(1.0),
            center: raw.profile_center.unwrap_or(0.5),
            width: raw.profile_width.unwrap_or(0.1),
        },
        other => return Err(format!("unknown profile `{other}` (expected constant, sin-bump, gaussian-bump)")),
    };
    Ok(profile)
}

/// Parses and validates; the error names the offending line.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| text[..s.start].matches('\n').count() + 1);
        CliError::Config {
            line,
            message: e.message().to_string(),
        }
    })?;
    let fail = |key: &str, message: String| CliError::Config {
        line: line_of(text, key),
        message,
    };

    let model = match raw.model.as_str() {
        "torus" => ModelKind::Torus,
        "warped_torus" => ModelKind::WarpedTorus,
        "sphere" => ModelKind::Sphere,
        "nc_torus" => ModelKind::NcTorus,
        other => {
            return Err(fail(
                "model",
                format!("unknown model `{other}` (expected torus, warped_torus, sphere, nc_torus)"),
            ))
        }
    };

    let window = raw.window.ok_or_else(|| fail("model", "missing key `K`".into()))?;
    if window < 2 {
        return Err(fail("K", format!("K must be at least 2, got {window}")));
    }
    let checks = parse_checks(&raw.checks).map_err(|m| fail("checks", m))?;
    let refinements = raw.refinements.unwrap_or(1);
    if refinements == 0 {
        return Err(fail("refinements", "refinements must be at least 1".into()));
    }

    let defaults = CheckOptions::default();
    let mut tolerances = [defaults.stability_band, defaults.condition2_band, defaults.analytic_tolerance];
    for (slot, (key, value)) in tolerances.iter_mut().zip([
        ("stability_band", raw.stability_band),
        ("condition2_band", raw.condition2_band),
        ("analytic_tolerance", raw.analytic_tolerance),
    ]) {
        if let Some(v) = value {
            if !(v > 0.0 && v < 1.0) {
                return Err(fail(key, format!("{key} must lie in (0, 1), got {v}")));
            }
            *slot = v;
        }
    }

    let theta = match &raw.theta_matrix {
        None => None,
        Some(rows) => {
            if model != ModelKind::NcTorus {
                return Err(fail("theta_matrix", "theta_matrix only applies to model nc_torus".into()));
            }
            let turns = rows
                .iter()
                .map(|r| r.iter().map(parse_turn).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|m| fail("theta_matrix", m))?;
            Some(ThetaMatrix::new(turns).map_err(|e| fail("theta_matrix", e.to_string()))?)
        }
    };

    let rank = match model {
        ModelKind::Sphere => 1,
        ModelKind::NcTorus => {
            let t = theta.as_ref().ok_or_else(|| fail("model", "model nc_torus needs theta_matrix".into()))?;
            t.n()
        }
        _ => raw.n.unwrap_or(1),
    };
    if let Some(n) = raw.n {
        if n != rank {
            return Err(fail("n", format!("n = {n} does not match the model rank {rank}")));
        }
    }
    if rank == 0 || (model == ModelKind::NcTorus && rank < 2) {
        return Err(fail("n", format!("rank {rank} is too small for model {}", model.as_str())));
    }

    let grid = match model {
        ModelKind::Torus => {
            if raw.grid.is_some() {
                return Err(fail("N", "model torus has no grid; drop N".into()));
            }
            None
        }
        _ => {
            let n = raw.grid.ok_or_else(|| fail("model", format!("missing key `N` for model {}", model.as_str())))?;
            if n < 16 {
                return Err(fail("N", format!("N must be at least 16, got {n}")));
            }
            Some(n)
        }
    };

    let sphere = if model == ModelKind::Sphere {
        let n_grid = grid.expect("checked");
        if n_grid < 64 {
            return Err(fail("N", format!("sphere needs N ≥ 64, got {n_grid}")));
        }
        let margin = raw.margin.unwrap_or(0.05);
        if !(margin > 0.0 && margin < PI / 8.0) {
            return Err(fail("margin", format!("margin must lie in (0, π/8), got {margin}")));
        }
        Some(SphereConfig {
            k_lift: raw.k_lift.unwrap_or(0),
            n_grid,
            window,
            margin,
            poles: raw.poles.unwrap_or(false),
        })
    } else {
        for (key, present) in [("margin", raw.margin.is_some()), ("k_lift", raw.k_lift.is_some()), ("poles", raw.poles.is_some())] {
            if present {
                return Err(fail(key, format!("{key} only applies to model sphere")));
            }
        }
        None
    };

    let profile = match model {
        ModelKind::WarpedTorus | ModelKind::NcTorus => Some(parse_profile(&raw).map_err(|m| {
            let key = if raw.f_samples.is_some() { "f_samples" } else { "profile" };
            fail(key, m)
        })?),
        _ => {
            if raw.profile.is_some() || raw.f_samples.is_some() {
                return Err(fail("profile", "profiles only apply to warped_torus and nc_torus".into()));
            }
            None
        }
    };

    let (l_range, ell_tail) = match (&raw.l_range, &raw.ell) {
        (Some(_), Some(_)) => return Err(fail("ell", "give either l_range or ell, not both".into())),
        (None, Some(ell)) => {
            if ell.len() != rank {
                return Err(fail("ell", format!("ell has {} components, model rank is {rank}", ell.len())));
            }
            ((ell[0], ell[0]), ell[1..].to_vec())
        }
        (Some(LRange::Single(l)), None) => ((*l, *l), vec![0; rank - 1]),
        (Some(LRange::Interval(v)), None) => {
            if v.len() != 2 || v[0] > v[1] {
                return Err(fail("l_range", "l_range must be an integer or [lo, hi] with lo ≤ hi".into()));
            }
            ((v[0], v[1]), vec![0; rank - 1])
        }
        (None, None) => ((0, 0), vec![0; rank - 1]),
    };
    let reach = l_range.0.abs().max(l_range.1.abs()).max(ell_tail.iter().map(|x| x.abs()).max().unwrap_or(0));
    if reach > window {
        return Err(fail("K", format!("window K = {window} does not contain ℓ with |ℓ| = {reach}")));
    }

    Ok(Scenario {
        model,
        rank,
        window,
        grid,
        sphere,
        profile,
        theta,
        checks,
        check_names: raw.checks.clone(),
        l_range,
        ell_tail,
        refinements,
        stability_band: tolerances[0],
        condition2_band: tolerances[1],
        analytic_tolerance: tolerances[2],
        output: raw.output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = "model = \"sphere\"\nk_lift = 0\nN = 256\nK = 8\nmargin = 0.05\nchecks = [\"full\"]\nl_range = [-2, 2]\n";

    #[test]
    fn minimal_sphere() {
        let s = parse_scenario(SPHERE).unwrap();
        assert_eq!(s.model, ModelKind::Sphere);
        assert_eq!(s.l_range, (-2, 2));
        assert_eq!(s.ells().len(), 5);
        assert!(s.checks.decides_factorisation());
    }

    fn nc(theta: &str) -> String {
        format!("model = \"nc_torus\"\nN = 16\nK = 3\nchecks = [\"ssa\"]\ntheta_matrix = {theta}\n")
    }

    #[test]
    fn skew_theta_accepted() {
        let s = parse_scenario(&nc("[[0, 0.5], [-0.5, 0]]")).unwrap();
        assert_eq!(s.rank, 2);
        let s = parse_scenario(&nc("[[\"0\", \"1/3\"], [\"-1/3\", \"0\"]]")).unwrap();
        assert!(s.theta.unwrap().get(0, 1).is_exact());
    }

    #[test]
    fn symmetric_theta_rejected() {
        let err = parse_scenario(&nc("[[0, 1], [1, 0]]")).unwrap_err();
        assert!(err.to_string().contains("skew-symmetry violated"), "{err}");
        assert!(err.to_string().contains("line 5"), "{err}");
    }

    #[test]
    fn range_errors_carry_lines() {
        let err = parse_scenario(&SPHERE.replace("K = 8", "K = 1")).unwrap_err();
        assert_eq!(err.to_string(), "line 4: K must be at least 2, got 1");
        let err = parse_scenario(&SPHERE.replace("model = \"sphere\"", "model = \"klein\"")).unwrap_err();
        assert!(err.to_string().starts_with("line 1: unknown model `klein`"));
        let err = parse_scenario(&SPHERE.replace("[\"full\"]", "[]")).unwrap_err();
        assert_eq!(err.to_string(), "line 6: checks must not be empty");
        let err = parse_scenario("model = \"warped_torus\"\nN = 8\nK = 3\nchecks = [\"ssa\"]\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: N must be at least 16, got 8");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_scenario(&format!("{SPHERE}colour = 3\n")).unwrap_err();
        assert!(err.to_string().contains("line 8"), "{err}");
        assert!(err.to_string().contains("colour"), "{err}");
    }
}
