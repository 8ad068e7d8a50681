//! Character-indexed truncations H = ⊕_k H_k and shift-block operators.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graded_core::{GradedMatrix, Parity};
use crate::sparse::SparseMatrix;

/// Lattice point of Zⁿ, i.e. a character of Tⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Character(pub Vec<i64>);

impl Character {
    pub fn new(k: &[i64]) -> Self {
        Character(k.to_vec())
    }

    pub fn zero(n: usize) -> Self {
        Character(vec![0; n])
    }

    /// e_j, 0-based.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut k = vec![0; n];
        k[j] = 1;
        Character(k)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n(), "character rank");
        Character(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Character(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: i64) -> Self {
        Character(self.0.iter().map(|a| a * s).collect())
    }

    pub fn l1(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).sum()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).max().unwrap_or(0)
    }

    pub fn euclidean(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|&a| (a * a) as f64).sum())
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        f.write_str("(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

/// Active characters {k : |k_j| ≤ K for all j}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TruncationWindow {
    n: usize,
    k_max: i64,
}

impl TruncationWindow {
    pub fn new(n: usize, k_max: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("torus rank must be at least 1".into()));
        }
        if k_max < 0 {
            return Err(Error::Config(format!("window bound {k_max} is negative")));
        }
        Ok(TruncationWindow { n, k_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn contains(&self, k: &Character) -> bool {
        k.n() == self.n && k.max_abs() <= self.k_max
    }

    pub fn require(&self, k: &Character) -> Result<()> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(Error::OutOfWindow { character: k.0.clone() })
        }
    }

    pub fn len(&self) -> usize {
        (2 * self.k_max as usize + 1).pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Characters in lexicographic order.
    pub fn characters(&self) -> Vec<Character> {
        self.characters_within(self.k_max)
    }

    /// Characters at distance at least `margin` from the window edge.
    pub fn interior(&self, margin: i64) -> Vec<Character> {
        self.characters_within(self.k_max - margin)
    }

    fn characters_within(&self, bound: i64) -> Vec<Character> {
        if bound < 0 {
            return Vec::new();
        }
        let mut out = vec![Character(Vec::new())];
        for _ in 0..self.n {
            let mut next = Vec::with_capacity(out.len() * (2 * bound as usize + 1));
            for prefix in &out {
                for k in -bound..=bound {
                    let mut c = prefix.0.clone();
                    c.push(k);
                    next.push(Character(c));
                }
            }
            out = next;
        }
        out
    }
}

/// Block dimensions (even, odd) of each sector in a window.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorSpace {
    window: TruncationWindow,
    dims: BTreeMap<Character, (usize, usize)>,
}

impl SectorSpace {
    pub fn uniform(window: TruncationWindow, dims: (usize, usize)) -> Arc<Self> {
        let dims = window.characters().into_iter().map(|k| (k, dims)).collect();
        Arc::new(SectorSpace { window, dims })
    }

    pub fn from_fn(window: TruncationWindow, f: impl Fn(&Character) -> (usize, usize)) -> Arc<Self> {
        let dims = window.characters().into_iter().map(|k| {
            let d = f(&k);
            (k, d)
        });
        Arc::new(SectorSpace {
            window,
            dims: dims.collect(),
        })
    }

    pub fn window(&self) -> &TruncationWindow {
        &self.window
    }

    pub fn block_dims(&self, k: &Character) -> Result<(usize, usize)> {
        self.dims
            .get(k)
            .copied()
            .ok_or_else(|| Error::OutOfWindow { character: k.0.clone() })
    }

    pub fn characters(&self) -> impl Iterator<Item = &Character> {
        self.dims.keys()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().map(|d| d.0 + d.1).sum()
    }
}

fn same_space(a: &Arc<SectorSpace>, b: &Arc<SectorSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Per-sector dense vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorVector {
    space: Arc<SectorSpace>,
    parts: BTreeMap<Character, Vec<Complex64>>,
}

impl SectorVector {
    pub fn zeros(space: &Arc<SectorSpace>) -> Self {
        let parts = space
            .dims
            .iter()
            .map(|(k, d)| (k.clone(), vec![Complex64::new(0.0, 0.0); d.0 + d.1]))
            .collect();
        SectorVector {
            space: space.clone(),
            parts,
        }
    }

    pub fn from_fn(space: &Arc<SectorSpace>, mut f: impl FnMut(&Character, usize) -> Complex64) -> Self {
        let mut v = Self::zeros(space);
        for (k, part) in v.parts.iter_mut() {
            for (i, x) in part.iter_mut().enumerate() {
                *x = f(k, i);
            }
        }
        v
    }

    pub fn part(&self, k: &Character) -> Option<&[Complex64]> {
        self.parts.get(k).map(|p| p.as_slice())
    }

    pub fn set_part(&mut self, k: &Character, values: Vec<Complex64>) -> Result<()> {
        let (e, o) = self.space.block_dims(k)?;
        if values.len() != e + o {
            return Err(Error::Dimension {
                context: "sector vector part",
                expected: e + o,
                found: values.len(),
            });
        }
        self.parts.insert(k.clone(), values);
        Ok(())
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Character, &Vec<Complex64>)> {
        self.parts.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        let mut out = self.clone();
        for (k, p) in out.parts.iter_mut() {
            for (x, y) in p.iter_mut().zip(&other.parts[k]) {
                *x += y;
            }
        }
        Ok(out)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.parts.values().flatten().map(|x| x.norm_sqr()).sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.parts
            .iter()
            .flat_map(|(k, p)| p.iter().zip(&other.parts[k]).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max)
    }
}

/// Operator given by blocks H_k → H_{k+μ}, keyed by (shift μ, source k).
#[derive(Clone, Debug)]
pub struct SectorOperator {
    space: Arc<SectorSpace>,
    parity: Parity,
    blocks: BTreeMap<(Character, Character), GradedMatrix>,
    truncation_loss: usize,
}

/// Operator norm with the policy that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// True when the operator has at most one shift, so the value is exact.
    pub exact: bool,
    pub shift_count: usize,
}

impl SectorOperator {
    pub fn zero(space: &Arc<SectorSpace>, parity: Parity) -> Self {
        SectorOperator {
            space: space.clone(),
            parity,
            blocks: BTreeMap::new(),
            truncation_loss: 0,
        }
    }

    /// Shift-μ operator with block `f(k)` at each source k; sources whose
    /// target leaves the window are dropped and tallied.
    pub fn shifted(
        space: &Arc<SectorSpace>,
        shift: &Character,
        parity: Parity,
        mut f: impl FnMut(&Character) -> Result<Option<GradedMatrix>>,
    ) -> Result<Self> {
        let mut op = Self::zero(space, parity);
        for k in space.window.characters() {
            let target = k.add(shift);
            if !space.window.contains(&target) {
                op.truncation_loss += 1;
                continue;
            }
            if let Some(block) = f(&k)? {
                op.insert(shift.clone(), k, block)?;
            }
        }
        Ok(op)
    }

    /// Shift-0 operator with block `f(k)`.
    pub fn diagonal(
        space: &Arc<SectorSpace>,
        parity: Parity,
        mut f: impl FnMut(&Character) -> Result<GradedMatrix>,
    ) -> Result<Self> {
        let zero = Character::zero(space.window.n());
        Self::shifted(space, &zero, parity, |k| f(k).map(Some))
    }

    pub fn identity(space: &Arc<SectorSpace>) -> Self {
        Self::diagonal(space, Parity::Even, |k| {
            let (e, o) = space.block_dims(k)?;
            Ok(GradedMatrix::identity(e, o))
        })
        .expect("identity blocks match the space")
    }

    /// P_χ: identity on H_χ, zero elsewhere.
    pub fn projection(space: &Arc<SectorSpace>, chi: &Character) -> Result<Self> {
        space.window.require(chi)?;
        let (e, o) = space.block_dims(chi)?;
        let mut op = Self::zero(space, Parity::Even);
        op.insert(Character::zero(chi.n()), chi.clone(), GradedMatrix::identity(e, o))?;
        Ok(op)
    }

    /// Adds or replaces one block after checking window, dimensions and parity.
    pub fn insert(&mut self, shift: Character, source: Character, block: GradedMatrix) -> Result<()> {
        let target = source.add(&shift);
        let src_dims = self.space.block_dims(&source)?;
        let dst_dims = self.space.block_dims(&target)?;
        if block.cols() != src_dims {
            return Err(Error::Dimension {
                context: "sector block columns",
                expected: src_dims.0 + src_dims.1,
                found: block.cols().0 + block.cols().1,
            });
        }
        if block.rows() != dst_dims {
            return Err(Error::Dimension {
                context: "sector block rows",
                expected: dst_dims.0 + dst_dims.1,
                found: block.rows().0 + block.rows().1,
            });
        }
        if block.parity() != self.parity {
            return Err(Error::Parity("block parity differs from operator parity"));
        }
        self.blocks.insert((shift, source), block);
        Ok(())
    }

    pub fn space(&self) -> &Arc<SectorSpace> {
        &self.space
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn truncation_loss(&self) -> usize {
        self.truncation_loss
    }

    pub fn record_truncation_loss(&mut self, count: usize) {
        self.truncation_loss += count;
    }

    /// Rebuilds every block on another space; `f` maps (shift, source, block) to the new block.
    pub fn transport(
        &self,
        space: &Arc<SectorSpace>,
        parity: Parity,
        mut f: impl FnMut(&Character, &Character, &GradedMatrix) -> Result<GradedMatrix>,
    ) -> Result<Self> {
        let mut out = Self::zero(space, parity);
        out.truncation_loss = self.truncation_loss;
        for ((s, k), b) in &self.blocks {
            out.insert(s.clone(), k.clone(), f(s, k, b)?)?;
        }
        Ok(out)
    }

    pub fn shifts(&self) -> Vec<Character> {
        let set: BTreeSet<&Character> = self.blocks.keys().map(|(s, _)| s).collect();
        set.into_iter().cloned().collect()
    }

    pub fn block(&self, shift: &Character, source: &Character) -> Option<&GradedMatrix> {
        self.blocks.get(&(shift.clone(), source.clone()))
    }

    /// Iterates `(shift, source, block)` in sorted order.
    pub fn blocks(&self) -> impl Iterator<Item = (&Character, &Character, &GradedMatrix)> {
        self.blocks.iter().map(|((s, k), b)| (s, k, b))
    }

    /// The single block of a shift-0 operator at sector ζ (zero if absent).
    pub fn restrict_to_sector(&self, zeta: &Character) -> Result<GradedMatrix> {
        self.space.window.require(zeta)?;
        if self.blocks.keys().any(|(s, _)| !s.is_zero()) {
            return Err(Error::Precondition("restriction needs a shift-0 operator".into()));
        }
        let d = self.space.block_dims(zeta)?;
        Ok(self
            .block(&Character::zero(zeta.n()), zeta)
            .cloned()
            .unwrap_or_else(|| GradedMatrix::zero(d, d, self.parity)))
    }

    /// A∘B; contributions whose target leaves the window are dropped and tallied.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        let my_shifts = self.shifts();
        let mut out = Self::zero(&self.space, self.parity + other.parity);
        out.truncation_loss = self.truncation_loss + other.truncation_loss;
        let mut acc: BTreeMap<(Character, Character), GradedMatrix> = BTreeMap::new();
        for ((nu, k), b) in &other.blocks {
            let mid = k.add(nu);
            for mu in &my_shifts {
                let target = mid.add(mu);
                if !self.space.window.contains(&target) {
                    out.truncation_loss += 1;
                    continue;
                }
                if let Some(a) = self.block(mu, &mid) {
                    let prod = a.mul(b)?;
                    let key = (nu.add(mu), k.clone());
                    match acc.remove(&key) {
                        Some(prev) => acc.insert(key, prev.add(&prod)?),
                        None => acc.insert(key, prod),
                    };
                }
            }
        }
        out.blocks = acc;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_space(&self.space, &other.space)?;
        if self.parity != other.parity {
            return Err(Error::Parity("sum of sector operators with different parity"));
        }
        let mut out = self.clone();
        out.truncation_loss += other.truncation_loss;
        for (key, b) in &other.blocks {
            let merged = match out.blocks.get(key) {
                Some(a) => a.add(b)?,
                None => b.clone(),
            };
            out.blocks.insert(key.clone(), merged);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b = b.scale(s);
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Multiplies the block at each source k by a scalar `f(shift, k)`.
    pub fn map_blocks(&self, mut f: impl FnMut(&Character, &Character, &GradedMatrix) -> GradedMatrix) -> Self {
        let mut out = self.clone();
        for ((s, k), b) in out.blocks.iter_mut() {
            *b = f(s, k, b);
        }
        out
    }

    /// The (μ, k) block's adjoint becomes the (−μ, k+μ) block.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.space, self.parity);
        out.truncation_loss = self.truncation_loss;
        for ((s, k), b) in &self.blocks {
            out.blocks.insert((s.neg(), k.add(s)), b.adjoint());
        }
        out
    }

    /// Largest singular value over blocks, summed over shifts when there are several.
    pub fn operator_norm(&self) -> NormEstimate {
        let mut per_shift: BTreeMap<&Character, f64> = BTreeMap::new();
        for ((s, _), b) in &self.blocks {
            let n = b.norm();
            let e = per_shift.entry(s).or_insert(0.0);
            *e = e.max(n);
        }
        let shift_count = per_shift.len();
        NormEstimate {
            value: per_shift.values().sum(),
            exact: shift_count <= 1,
            shift_count,
        }
    }

    /// Norm of the operator restricted to each source sector (summed over shifts).
    pub fn per_sector_norms(&self) -> BTreeMap<Character, f64> {
        let mut out: BTreeMap<Character, f64> =
            self.space.window.characters().into_iter().map(|k| (k, 0.0)).collect();
        for ((_, k), b) in &self.blocks {
            *out.get_mut(k).expect("block sources lie in the window") += b.norm();
        }
        out
    }

    /// Upper bound for ‖A − A*‖/‖A‖: Frobenius norm of the difference over
    /// the largest entry of A, both taken over all blocks.
    pub fn self_adjoint_defect(&self) -> Result<f64> {
        let diff = self.sub(&self.adjoint())?;
        let scale = self.blocks.values().map(|b| b.entries().max_abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Ok(0.0);
        }
        let sq: f64 = diff.blocks.values().map(|b| {
            let f = b.entries().frobenius_norm();
            f * f
        }).sum();
        Ok(libm::sqrt(sq) / scale)
    }

    pub fn apply(&self, v: &SectorVector) -> Result<SectorVector> {
        same_space(&self.space, &v.space)?;
        let mut out = SectorVector::zeros(&self.space);
        for ((s, k), b) in &self.blocks {
            let y = b.entries().mul_vec(&v.parts[k]);
            let target = out.parts.get_mut(&k.add(s)).expect("block targets lie in the window");
            for (t, x) in target.iter_mut().zip(y) {
                *t += x;
            }
        }
        Ok(out)
    }

    /// Dense matrix on the whole truncated space, sectors in lexicographic order.
    pub fn to_sparse(&self) -> SparseMatrix {
        let mut offset = BTreeMap::new();
        let mut acc = 0;
        for (k, d) in &self.space.dims {
            offset.insert(k, acc);
            acc += d.0 + d.1;
        }
        let mut t = Vec::new();
        for ((s, k), b) in &self.blocks {
            let r0 = offset[&k.add(s)];
            let c0 = offset[k];
            for (r, c, v) in b.entries().iter() {
                t.push((r0 + r, c0 + c, v));
            }
        }
        SparseMatrix::from_triplets(acc, acc, t)
    }
}

/// A∘B − (−1)^{deg A · deg B} B∘A
pub fn graded_commutator_sector(a: &SectorOperator, b: &SectorOperator) -> Result<SectorOperator> {
    let ab = a.compose(b)?;
    let ba = b.compose(a)?;
    ab.sub(&ba.scale_real(Parity::koszul(a.parity, b.parity)))
}

/// Things that can be cut down to one sector.
pub trait SectorProjection: Sized {
    fn sector_projection(&self, chi: &Character) -> Result<Self>;
}

impl SectorProjection for SectorVector {
    /// Zero every sector except χ.
    fn sector_projection(&self, chi: &Character) -> Result<Self> {
        self.space.window.require(chi)?;
        let mut out = SectorVector::zeros(&self.space);
        out.parts.insert(chi.clone(), self.parts[chi].clone());
        Ok(out)
    }
}

impl SectorProjection for SectorOperator {
    /// Keep only the blocks with source χ, i.e. A∘P_χ.
    fn sector_projection(&self, chi: &Character) -> Result<Self> {
        self.space.window.require(chi)?;
        let mut out = self.clone();
        out.blocks.retain(|(_, k), _| k == chi);
        Ok(out)
    }
}

pub fn sector_projection<T: SectorProjection>(x: &T, chi: &Character) -> Result<T> {
    x.sector_projection(chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(space: &Arc<SectorSpace>, shift: i64) -> SectorOperator {
        SectorOperator::shifted(space, &Character::new(&[shift]), Parity::Even, |_| {
            Ok(Some(GradedMatrix::identity(1, 0)))
        })
        .unwrap()
    }

    #[test]
    fn window_enumeration() {
        let w = TruncationWindow::new(2, 1).unwrap();
        let ks = w.characters();
        assert_eq!(ks.len(), 9);
        assert_eq!(ks[0], Character::new(&[-1, -1]));
        assert_eq!(w.interior(1), vec![Character::zero(2)]);
    }

    #[test]
    fn shift_round_trip_is_identity_inside() {
        let space = SectorSpace::uniform(TruncationWindow::new(1, 3).unwrap(), (1, 0));
        let up = ones(&space, 1);
        let down = ones(&space, -1);
        let p = up.compose(&down).unwrap();
        assert!(p.block(&Character::new(&[0]), &Character::new(&[-3])).is_none());
        for k in -2..=3 {
            let b = p.block(&Character::new(&[0]), &Character::new(&[k])).unwrap();
            assert_eq!(b.entries().get(0, 0), Complex64::new(1.0, 0.0));
        }
        assert!(p.truncation_loss() >= 2);
    }

    #[test]
    fn projections_are_orthogonal() {
        let space = SectorSpace::uniform(TruncationWindow::new(1, 2).unwrap(), (1, 1));
        let p0 = SectorOperator::projection(&space, &Character::new(&[0])).unwrap();
        let p1 = SectorOperator::projection(&space, &Character::new(&[1])).unwrap();
        assert_eq!(p0.compose(&p1).unwrap().blocks().count(), 0);
        assert_eq!(p0.compose(&p0).unwrap().operator_norm().value, 1.0);
        assert!(SectorOperator::projection(&space, &Character::new(&[3])).is_err());
    }

    #[test]
    fn adjoint_moves_blocks() {
        let space = SectorSpace::uniform(TruncationWindow::new(1, 2).unwrap(), (1, 0));
        let up = ones(&space, 1);
        let adj = up.adjoint();
        assert_eq!(adj.shifts(), vec![Character::new(&[-1])]);
        assert!(adj.block(&Character::new(&[-1]), &Character::new(&[2])).is_some());
    }
}
