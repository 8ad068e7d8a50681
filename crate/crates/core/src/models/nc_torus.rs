use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graded_core::{GradedMatrix, Parity};
use crate::sectors::{Character, SectorOperator, SectorSpace, TruncationWindow};
use crate::sparse::SparseMatrix;

const MAX_DENOMINATOR: i64 = 1000;
const EXACT_DENOMINATOR_LIMIT: i64 = 1 << 40;

/// A real number of turns, so that e(x) = e^{2πix}. Rationals are kept exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Turn {
    /// num/den in lowest terms, den > 0.
    Exact { num: i64, den: i64 },
    Approx(f64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// x mod 1 in [0, 1).
fn frac(x: f64) -> f64 {
    x - libm::floor(x)
}

impl Turn {
    pub fn zero() -> Self {
        Turn::Exact { num: 0, den: 1 }
    }

    pub fn exact(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Input("zero denominator".into()));
        }
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ok(Turn::Exact {
            num: s * num / g,
            den: s * den / g,
        })
    }

    /// Recognises p/q with q ≤ 1000 when |x − p/q| < 1e−15.
    pub fn from_f64(x: f64) -> Self {
        for q in 1..=MAX_DENOMINATOR {
            let p = libm::round(x * q as f64);
            if (x - p / q as f64).abs() < 1e-15 {
                return Turn::exact(p as i64, q).expect("q > 0");
            }
        }
        Turn::Approx(x)
    }

    pub fn value(self) -> f64 {
        match self {
            Turn::Exact { num, den } => num as f64 / den as f64,
            Turn::Approx(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Turn::Exact { .. })
    }

    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (Turn::Exact { num: a, den: b }, Turn::Exact { num: c, den: d }) => {
                let l = b / gcd(b, d) * d;
                if l > EXACT_DENOMINATOR_LIMIT {
                    return Turn::Approx(self.value() + other.value());
                }
                match (a.checked_mul(l / b), c.checked_mul(l / d)) {
                    (Some(x), Some(y)) => Turn::exact(x + y, l).expect("l > 0").reduced_mod1(),
                    _ => Turn::Approx(self.value() + other.value()),
                }
            }
            _ => Turn::Approx(self.value() + other.value()),
        }
    }

    pub fn neg(self) -> Self {
        match self {
            Turn::Exact { num, den } => Turn::Exact { num: -num, den },
            Turn::Approx(x) => Turn::Approx(-x),
        }
    }

    pub fn mul_int(self, k: i64) -> Self {
        match self {
            Turn::Exact { num, den } => match num.checked_mul(k) {
                Some(p) => Turn::exact(p, den).expect("den > 0").reduced_mod1(),
                None => Turn::Approx(self.value() * k as f64),
            },
            Turn::Approx(x) => Turn::Approx(x * k as f64),
        }
    }

    /// Representative in [0, 1) for exact turns; approximate turns are left alone.
    fn reduced_mod1(self) -> Self {
        match self {
            Turn::Exact { num, den } => Turn::Exact {
                num: num.rem_euclid(den),
                den,
            },
            t => t,
        }
    }

    /// Equality modulo 1: exact when both sides are exact, else within `tol`.
    pub fn eq_mod1(self, other: Self, tol: f64) -> bool {
        match (self.reduced_mod1(), other.reduced_mod1()) {
            (a @ Turn::Exact { .. }, b @ Turn::Exact { .. }) => a == b,
            (a, b) => {
                let d = frac(a.value() - b.value());
                d.min(1.0 - d) <= tol
            }
        }
    }

    /// e^{2πix}
    pub fn phase(self) -> Complex64 {
        let x = match self.reduced_mod1() {
            Turn::Exact { num, den } => num as f64 / den as f64,
            Turn::Approx(x) => frac(x),
        };
        Complex64::from_polar(1.0, 2.0 * PI * x)
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Turn::Exact { num, den: 1 } => write!(f, "{num}"),
            Turn::Exact { num, den } => write!(f, "{num}/{den}"),
            Turn::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Real skew-symmetric n×n deformation matrix θ.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    n: usize,
    entries: Vec<Vec<Turn>>,
}

impl ThetaMatrix {
    pub fn new(rows: Vec<Vec<Turn>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("theta matrix must be square".into()));
        }
        for j in 0..n {
            for k in j..n {
                let s = rows[j][k].add(rows[k][j]);
                // sums of exact turns are reduced mod 1, so compare the raw values too
                let raw = rows[j][k].value() + rows[k][j].value();
                let zero = match s {
                    Turn::Exact { num, .. } => num == 0 && raw.abs() < 0.5,
                    Turn::Approx(_) => raw.abs() <= 1e-12,
                };
                if !zero {
                    return Err(Error::Input(format!("skew-symmetry violated at ({}, {})", j + 1, k + 1)));
                }
            }
        }
        Ok(ThetaMatrix { n, entries: rows })
    }

    pub fn from_f64(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|x| Turn::from_f64(*x)).collect()).collect())
    }

    pub fn zero(n: usize) -> Self {
        ThetaMatrix {
            n,
            entries: alloc::vec![alloc::vec![Turn::zero(); n]; n],
        }
    }

    /// n = 2 with θ₁₂ = t.
    pub fn two(t: Turn) -> Result<Self> {
        Self::new(alloc::vec![alloc::vec![Turn::zero(), t], alloc::vec![t.neg(), Turn::zero()]])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> Turn {
        self.entries[j][k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|t| t.value() == 0.0)
    }

    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|t| t.value()).collect()).collect()
    }

    /// α_j(m) = Σ_{q>j} θ_{jq} m_q, the phase of U_j on δ_m.
    fn alpha(&self, j: usize, m: &[i64]) -> Turn {
        ((j + 1)..self.n).fold(Turn::zero(), |acc, q| acc.add(self.entries[j][q].mul_int(m[q])))
    }
}

/// U^k δ_m = e(turn) δ_{m'} on ℓ²(Zⁿ), with U^k = U_1^{k_1}···U_n^{k_n}
/// (so U_n^{k_n} acts first) and U_j δ_m = e(α_j(m)) δ_{m+e_j}.
pub fn apply_monomial(theta: &ThetaMatrix, k: &Character, m: &Character) -> Result<(Turn, Character)> {
    if k.n() != theta.n() || m.n() != theta.n() {
        return Err(Error::Dimension {
            context: "monomial rank",
            expected: theta.n(),
            found: k.n().min(m.n()),
        });
    }
    let mut pos = m.0.clone();
    let mut turn = Turn::zero();
    for j in (0..theta.n()).rev() {
        let steps = k.0[j];
        for _ in 0..steps.abs() {
            if steps > 0 {
                turn = turn.add(theta.alpha(j, &pos));
                pos[j] += 1;
            } else {
                pos[j] -= 1;
                turn = turn.add(theta.alpha(j, &pos).neg());
            }
        }
    }
    Ok((turn, Character(pos)))
}

/// Outcome of checking U_jU_k = e(θ_jk)U_kU_j on interior sectors.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RelationCheck {
    pub pair: (usize, usize),
    pub sectors_checked: usize,
    /// Every phase comparison was made in exact rational arithmetic and held.
    pub exact: bool,
    /// Phases agree (exactly or within 1e−12 turns).
    pub holds: bool,
    /// max |(U_jU_k − e(θ_jk)U_kU_j) block| in floating point.
    pub max_deviation: f64,
}

/// Generators U_j of the noncommutative torus acting on ℓ²(Zⁿ) truncated to a window.
#[derive(Clone, Debug)]
pub struct NCTorusGenerators {
    theta: ThetaMatrix,
    window: TruncationWindow,
    u: Vec<SectorOperator>,
}

impl NCTorusGenerators {
    pub fn theta(&self) -> &ThetaMatrix {
        &self.theta
    }

    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    pub fn generators(&self) -> &[SectorOperator] {
        &self.u
    }

    /// Checks the commutation relation for generators j, k (0-based).
    pub fn relation(&self, j: usize, k: usize) -> Result<RelationCheck> {
        let n = self.theta.n();
        if j >= n || k >= n {
            return Err(Error::Input(format!("generator index out of range for n = {n}")));
        }
        let ej = Character::unit(n, j);
        let ek = Character::unit(n, k);
        let both = ej.add(&ek);
        let twist = self.theta.get(j, k);
        let mut exact = twist.is_exact();
        let mut holds = true;
        let mut count = 0;
        for m in self.window.characters() {
            if !self.window.contains(&m.add(&both)) || !self.window.contains(&m.add(&ej)) || !self.window.contains(&m.add(&ek)) {
                continue;
            }
            count += 1;
            let jk = self.theta.alpha(k, &m.0).add(self.theta.alpha(j, &m.add(&ek).0));
            let kj = self.theta.alpha(j, &m.0).add(self.theta.alpha(k, &m.add(&ej).0));
            exact &= jk.is_exact() && kj.is_exact();
            holds &= jk.eq_mod1(twist.add(kj), 1e-12);
        }
        let lhs = self.u[j].compose(&self.u[k])?;
        let rhs = self.u[k].compose(&self.u[j])?.scale(twist.phase());
        let mut max_deviation: f64 = 0.0;
        for (shift, source, b) in lhs.blocks() {
            if let Some(c) = rhs.block(shift, source) {
                max_deviation = max_deviation.max(b.max_abs_diff(c));
            }
        }
        Ok(RelationCheck {
            pair: (j, k),
            sectors_checked: count,
            exact: exact && holds,
            holds,
            max_deviation,
        })
    }

    /// max |U_j*U_j − 1| over blocks whose image stays in the window.
    pub fn unitarity_defect(&self, j: usize) -> Result<f64> {
        let p = self.u[j].adjoint().compose(&self.u[j])?;
        let mut worst: f64 = 0.0;
        for (_, _, b) in p.blocks() {
            worst = worst.max(b.max_abs_diff(&GradedMatrix::identity(1, 0)));
        }
        Ok(worst)
    }
}

pub fn build_nc_torus(n: usize, theta: &ThetaMatrix, k_max: i64) -> Result<NCTorusGenerators> {
    if theta.n() != n {
        return Err(Error::Input(format!("theta is {}×{} but n = {n}", theta.n(), theta.n())));
    }
    let window = TruncationWindow::new(n, k_max)?;
    let space = SectorSpace::uniform(window, (1, 0));
    let u = (0..n)
        .map(|j| {
            SectorOperator::shifted(&space, &Character::unit(n, j), Parity::Even, |m| {
                let ph = theta.alpha(j, &m.0).phase();
                GradedMatrix::square(1, 0, SparseMatrix::from_diagonal(&[ph]), Parity::Even).map(Some)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NCTorusGenerators {
        theta: theta.clone(),
        window,
        u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_detected() {
        assert_eq!(Turn::from_f64(1.0 / 3.0), Turn::Exact { num: 1, den: 3 });
        assert_eq!(Turn::from_f64(-0.5), Turn::Exact { num: -1, den: 2 });
        assert!(!Turn::from_f64(core::f64::consts::FRAC_1_SQRT_2).is_exact());
    }

    #[test]
    fn skew_check() {
        assert!(ThetaMatrix::from_f64(&[alloc::vec![0.0, 0.5], alloc::vec![-0.5, 0.0]]).is_ok());
        let err = ThetaMatrix::from_f64(&[alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]]).unwrap_err();
        assert!(format!("{err}").contains("skew-symmetry violated"));
    }

    #[test]
    fn one_third_relation_is_exact() {
        let theta = ThetaMatrix::two(Turn::exact(1, 3).unwrap()).unwrap();
        let g = build_nc_torus(2, &theta, 3).unwrap();
        let r = g.relation(0, 1).unwrap();
        assert!(r.exact && r.holds);
        assert!(r.sectors_checked > 0);
        assert!(r.max_deviation < 1e-15);
        assert!(g.unitarity_defect(0).unwrap() < 1e-15);
    }

    #[test]
    fn group_commutator_phase() {
        // U1 U2 U1⁻¹ U2⁻¹ δ_0 = e(θ12) δ_0
        let theta = ThetaMatrix::two(Turn::exact(1, 3).unwrap()).unwrap();
        let mut turn = Turn::zero();
        let mut pos = Character::zero(2);
        for k in [[0, -1], [-1, 0], [0, 1], [1, 0]] {
            let (t, p) = apply_monomial(&theta, &Character::new(&k), &pos).unwrap();
            turn = turn.add(t);
            pos = p;
        }
        assert!(pos.is_zero());
        assert!(turn.eq_mod1(Turn::exact(1, 3).unwrap(), 0.0));
    }
}
