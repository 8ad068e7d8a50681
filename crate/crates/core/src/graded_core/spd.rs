use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// W = h^{-1/2} for self-adjoint positive-definite h, so that W h W = 1.
pub fn inverse_sqrt_spd(h: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension {
            context: "inverse square root needs a square matrix",
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let scale = h.norm();
    if (h - h.adjoint()).norm() > 1e-12 * scale.max(1.0) {
        return Err(Error::Input("matrix is not self-adjoint".into()));
    }
    let eig = SymmetricEigen::new(h.clone());
    let lambda_max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let tol = 1e-14 * lambda_max.max(f64::MIN_POSITIVE);
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l <= tol) {
        return Err(Error::Spectral { eigenvalue: bad });
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / libm::sqrt(l), 0.0)));
    Ok(v * d * v.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, data: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(rows, rows, data).map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn identity_maps_to_identity() {
        let w = inverse_sqrt_spd(&DMatrix::identity(3, 3)).unwrap();
        assert!((w - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_case() {
        let w = inverse_sqrt_spd(&real(2, &[4.0, 0.0, 0.0, 9.0])).unwrap();
        assert!((w - real(2, &[0.5, 0.0, 0.0, 1.0 / 3.0])).norm() < 1e-14);
    }

    #[test]
    fn sphere_orbit_gram() {
        for (theta, want) in [(core::f64::consts::FRAC_PI_2, 1.0), (core::f64::consts::FRAC_PI_6, 2.0)] {
            let s = libm::sin(theta);
            let w = inverse_sqrt_spd(&real(1, &[s * s])).unwrap();
            assert!((w[(0, 0)].re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let err = inverse_sqrt_spd(&real(2, &[1.0, 0.0, 0.0, -2.0])).unwrap_err();
        assert_eq!(err, Error::Spectral { eigenvalue: -2.0 });
    }
}
