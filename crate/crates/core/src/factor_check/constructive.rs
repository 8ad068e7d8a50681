use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::EquivariantTriple;
use crate::sectors::{Character, SectorOperator};

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapRow {
    pub character: Character,
    /// ‖(D − T)P_k‖
    pub gap: f64,
    /// 2π max_s (Σ_j (k_j(1 − 1/f_j))²)^{1/2}, from the profile values alone
    pub oracle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GapReport {
    pub ell: Character,
    pub rows: Vec<GapRow>,
    /// least-squares slope of the gap against |k|
    pub slope: f64,
    pub intercept: f64,
    pub oracle_slope: Option<f64>,
    pub slope_relative_error: Option<f64>,
    /// slope above 1e−3: D − T is not bounded
    pub unbounded: bool,
}

#[derive(Clone, Debug)]
pub struct ConstructiveProduct {
    pub t: SectorOperator,
    pub self_adjoint_defect: f64,
    pub gap: GapReport,
}

/// Least-squares line through (x, y); returns (slope, intercept).
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

/// T = D + Σ_{r,j} (W^{rj} − h^{rj}) c(X_r♭) ∇_{X_j} + B, where B removes the
/// skew-adjoint part of the first-order correction.
pub fn constructive_product(triple: &EquivariantTriple, ell: &Character) -> Result<ConstructiveProduct> {
    let metric = triple.metric.as_ref().ok_or(Error::MissingMetric)?;
    let n = triple.rank();
    let mut z: Option<SectorOperator> = None;
    for r in 0..n {
        for j in 0..n {
            let coeff = metric.w[r][j].sub(&metric.h_inverse[r][j])?;
            let term = coeff.compose(&metric.clifford_flat[r])?.compose(&metric.connection[j])?;
            z = Some(match z {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
    }
    let z = z.expect("rank ≥ 1");
    let sym = z.add(&z.adjoint())?.scale_real(0.5);
    let t = triple.dirac.add(&sym)?;
    let self_adjoint_defect = t.self_adjoint_defect()?;
    let diff = triple.dirac.sub(&t)?;
    let norms = diff.per_sector_norms();

    let mut rows = Vec::new();
    for k in triple.space.window().characters() {
        let gap = norms.get(&k).copied().unwrap_or(0.0);
        let oracle = triple.geometry.as_ref().map(|g| {
            2.0 * PI
                * g.orbit_defect
                    .iter()
                    .map(|c| libm::sqrt(c.iter().zip(&k.0).map(|(c, m)| (c * *m as f64) * (c * *m as f64)).sum::<f64>()))
                    .fold(0.0, f64::max)
        });
        rows.push(GapRow { character: k, gap, oracle });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.character.euclidean()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let (slope, intercept) = fit_slope(&xs, &ys);
    let oracle_slope = if rows.iter().all(|r| r.oracle.is_some()) {
        let os: Vec<f64> = rows.iter().map(|r| r.oracle.expect("checked")).collect();
        Some(fit_slope(&xs, &os).0)
    } else {
        None
    };
    let slope_relative_error = oracle_slope.map(|o| if o.abs() > 1e-12 { (slope - o).abs() / o.abs() } else { slope.abs() });
    Ok(ConstructiveProduct {
        t,
        self_adjoint_defect,
        gap: GapReport {
            ell: ell.clone(),
            rows,
            slope,
            intercept,
            oracle_slope,
            slope_relative_error,
            unbounded: slope > 1e-3,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit() {
        let (s, c) = fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14);
    }
}
