use core::f64::consts::PI;

use super::PositivityOutcome;
use crate::models::GeometrySummary;
use crate::sectors::{Character, TruncationWindow};

/// Lower bound Q(k) = aΣk_j² − bΣ|k_j| − dΣ|k_j − ℓ_j| for the positivity form on sector k.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Certificate {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub ell: Character,
    /// min of Q over the window
    pub r: f64,
    pub argmin: Character,
    /// a·K > b + d, so Q grows outside the window and R is the global minimum
    pub window_sufficient: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CertificateCheck {
    pub valid: bool,
    /// min over sectors of λ_min(k) − Q(k)
    pub worst_margin: f64,
}

impl Certificate {
    pub fn q(&self, k: &Character) -> f64 {
        let sq: i64 = k.0.iter().map(|x| x * x).sum();
        let abs: i64 = k.0.iter().map(|x| x.abs()).sum();
        let off: i64 = k.0.iter().zip(&self.ell.0).map(|(x, l)| (x - l).abs()).sum();
        self.a * sq as f64 - self.b * abs as f64 - self.d * off as f64
    }

    /// Sector minima of the scan must dominate Q up to `tolerance`.
    pub fn validate(&self, outcome: &PositivityOutcome, tolerance: f64) -> CertificateCheck {
        let worst_margin = outcome
            .finest_minima()
            .map(|(k, lo)| lo - self.q(k))
            .fold(f64::INFINITY, f64::min);
        CertificateCheck {
            valid: worst_margin >= -tolerance,
            worst_margin,
        }
    }
}

/// a = 8π² inf λ(W), b = 8π² n max|ℓ_p| sup|W^{jp}|, d = 4π sup_p ‖W ω_p‖.
pub fn lower_bound_certificate(geometry: &GeometrySummary, ell: &Character, window: &TruncationWindow) -> Certificate {
    let n = ell.n() as f64;
    let a = 8.0 * PI * PI * geometry.w_min_eigenvalue;
    let b = 8.0 * PI * PI * n * ell.max_abs() as f64 * geometry.w_sup_entry;
    let d = 4.0 * PI * geometry.endomorphism_sup.iter().copied().fold(0.0, f64::max);
    let mut cert = Certificate {
        a,
        b,
        d,
        ell: ell.clone(),
        r: f64::INFINITY,
        argmin: Character::zero(ell.n()),
        window_sufficient: a * window.k_max() as f64 > b + d,
    };
    for k in window.characters() {
        let q = cert.q(&k);
        if q < cert.r {
            cert.r = q;
            cert.argmin = k;
        }
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn geometry(w: f64) -> GeometrySummary {
        GeometrySummary {
            w_min_eigenvalue: w,
            w_sup_entry: w,
            endomorphism_sup: vec![0.0],
            orbit_defect: vec![],
        }
    }

    #[test]
    fn flat_and_scaled() {
        let win = TruncationWindow::new(1, 4).unwrap();
        let ell = Character::new(&[0]);
        let c = lower_bound_certificate(&geometry(1.0), &ell, &win);
        assert!((c.a - 8.0 * PI * PI).abs() < 1e-12);
        assert_eq!(c.r, 0.0);
        let c = lower_bound_certificate(&geometry(0.5), &ell, &win);
        assert!((c.a - 4.0 * PI * PI).abs() < 1e-12);
    }
}
