use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Parity, SpinorRep};
use crate::error::{Error, Result};

/// Largest generator count stored densely (2ⁿ coefficients).
pub const MAX_GENERATORS: usize = 8;

/// Element of ℂl_n over the ordered-monomial basis; bit `j-1` of a mask marks generator `e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    n: usize,
    coeffs: Vec<Complex64>,
}

/// Sign of e_A e_B after reordering into the increasing monomial e_{A xor B}.
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl CliffordElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        CliffordElement {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); 1 << n],
        }
    }

    pub fn scalar(n: usize, c: Complex64) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[0] = c;
        e
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, Complex64::new(1.0, 0.0))
    }

    /// The generator e_j, 1-based.
    pub fn generator(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::Dimension {
                context: "Clifford generator index",
                expected: n,
                found: j,
            });
        }
        let mut e = Self::zero(n);
        e.coeffs[1 << (j - 1)] = Complex64::new(1.0, 0.0);
        Ok(e)
    }

    /// Product e_{i₁}···e_{i_r} of generators in the given (arbitrary) order.
    pub fn monomial(n: usize, indices: &[usize]) -> Result<Self> {
        let mut acc = Self::one(n);
        for &j in indices {
            acc = acc.mul(&Self::generator(n, j)?)?;
        }
        Ok(acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: usize) -> Complex64 {
        self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn check_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                context: "Clifford generator count",
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        let mut out = Self::zero(self.n);
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, &y) in other.coeffs.iter().enumerate() {
                if y != Complex64::new(0.0, 0.0) {
                    out.coeffs[a ^ b] += x * y * reorder_sign(a, b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_n(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CliffordElement { n: self.n, coeffs })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CliffordElement {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Adjoint: conjugates coefficients and reverses monomials.
    pub fn adjoint(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                let r = mask.count_ones() as usize;
                let sign = if (r * r.saturating_sub(1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                c.conj() * sign
            })
            .collect();
        CliffordElement { n: self.n, coeffs }
    }

    /// Parity if the element is homogeneous (zero counts as even).
    pub fn degree(&self) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let p = Parity::from_bit(mask.count_ones() as usize);
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Image under a spinor representation with the same generator count.
    pub fn represent(&self, rep: &SpinorRep) -> Result<DMatrix<Complex64>> {
        if rep.n() != self.n {
            return Err(Error::Dimension {
                context: "spinor representation generator count",
                expected: self.n,
                found: rep.n(),
            });
        }
        let gammas: Vec<DMatrix<Complex64>> = rep.gamma().iter().map(|g| g.entries().to_dense()).collect();
        let d = rep.dim();
        let mut out = DMatrix::zeros(d, d);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let mut m = DMatrix::<Complex64>::identity(d, d);
            for (j, g) in gammas.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    m *= g;
                }
            }
            out += m * c;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_squares_to_one() {
        let e1 = CliffordElement::generator(3, 1).unwrap();
        assert_eq!(e1.mul(&e1).unwrap(), CliffordElement::one(3));
    }

    #[test]
    fn generators_anticommute() {
        let e1 = CliffordElement::generator(2, 1).unwrap();
        let e2 = CliffordElement::generator(2, 2).unwrap();
        let e12 = e1.mul(&e2).unwrap();
        let e21 = e2.mul(&e1).unwrap();
        assert_eq!(e12.coeff(0b11), Complex64::new(1.0, 0.0));
        assert_eq!(e21.coeff(0b11), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn bivector_squares_to_minus_one() {
        let e12 = CliffordElement::monomial(2, &[1, 2]).unwrap();
        assert_eq!(e12.mul(&e12).unwrap(), CliffordElement::scalar(2, Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn mismatched_n_is_rejected() {
        let a = CliffordElement::one(2);
        let b = CliffordElement::one(3);
        assert!(matches!(a.mul(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn degree_of_monomials() {
        assert_eq!(CliffordElement::monomial(4, &[2, 4, 1]).unwrap().degree(), Some(Parity::Odd));
        let mixed = CliffordElement::one(2).add(&CliffordElement::generator(2, 1).unwrap()).unwrap();
        assert_eq!(mixed.degree(), None);
    }
}
