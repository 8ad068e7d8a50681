//! Spectral subspace assumption, decided on a finite cell model of M/Tⁿ.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::Verdict;
use crate::error::{Error, Result};
use crate::sectors::Character;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CellKind {
    Point,
    Open,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Cell {
    pub kind: CellKind,
    pub label: String,
}

impl Cell {
    pub fn point(label: &str) -> Self {
        Cell {
            kind: CellKind::Point,
            label: label.into(),
        }
    }

    pub fn open(label: &str) -> Self {
        Cell {
            kind: CellKind::Open,
            label: label.into(),
        }
    }
}

/// Points and open intervals in order (optionally closed up into a circle),
/// with the support of each spectral subspace as a set of cells.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSpaceModel {
    cells: Vec<Cell>,
    periodic: bool,
    supports: BTreeMap<Character, Vec<bool>>,
}

impl OrbitSpaceModel {
    pub fn new(cells: Vec<Cell>, periodic: bool) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Input("orbit space has no cells".into()));
        }
        let n = cells.len();
        let pairs = if periodic && n > 1 { n } else { n - 1 };
        for i in 0..pairs {
            if cells[i].kind == cells[(i + 1) % n].kind {
                return Err(Error::Input("adjacent orbit-space cells must alternate point/open".into()));
            }
        }
        if periodic && n == 1 && cells[0].kind == CellKind::Open {
            return Err(Error::Input("a circle needs at least one point cell".into()));
        }
        Ok(OrbitSpaceModel {
            cells,
            periodic,
            supports: BTreeMap::new(),
        })
    }

    /// A single point (orbit space of a transitive action).
    pub fn point() -> Self {
        Self::new(vec![Cell::point("*")], false).expect("valid")
    }

    /// Open interval, e.g. (0, π) for the punctured sphere.
    pub fn open_interval(label: &str) -> Self {
        Self::new(vec![Cell::open(label)], false).expect("valid")
    }

    /// Closed interval [a, b] as point, open, point.
    pub fn closed_interval(a: &str, inside: &str, b: &str) -> Self {
        Self::new(vec![Cell::point(a), Cell::open(inside), Cell::point(b)], false).expect("valid")
    }

    /// Circle as one point and one open arc.
    pub fn circle(label: &str) -> Self {
        Self::new(vec![Cell::point("0"), Cell::open(label)], true).expect("valid")
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn supports(&self) -> &BTreeMap<Character, Vec<bool>> {
        &self.supports
    }

    pub fn set_support(&mut self, chi: Character, cells: Vec<bool>) -> Result<()> {
        if cells.len() != self.cells.len() {
            return Err(Error::Dimension {
                context: "support cell mask",
                expected: self.cells.len(),
                found: cells.len(),
            });
        }
        self.supports.insert(chi, cells);
        Ok(())
    }

    pub fn set_full_support(&mut self, chi: Character) {
        let n = self.cells.len();
        self.supports.insert(chi, vec![true; n]);
    }

    /// Support made of the open cells only (functions vanishing on every point cell).
    pub fn set_open_support(&mut self, chi: Character) {
        let mask = self.cells.iter().map(|c| c.kind == CellKind::Open).collect();
        self.supports.insert(chi, mask);
    }

    /// Clopen in the cell topology: every point/open adjacency has equal membership.
    pub fn is_clopen(&self, set: &[bool]) -> bool {
        let n = self.cells.len();
        let pairs = if self.periodic && n > 1 { n } else { n.saturating_sub(1) };
        (0..pairs).all(|i| set[i] == set[(i + 1) % n])
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SsaOutcome {
    pub verdict: Verdict,
    /// First character (by |k|₁, positive before negative) whose ideal is not complemented.
    pub witness: Option<Character>,
    pub characters_checked: usize,
}

/// Ordering used to pick witnesses: |k|₁ first, then reverse lexicographic.
pub fn witness_order(a: &Character, b: &Character) -> core::cmp::Ordering {
    a.l1().cmp(&b.l1()).then_with(|| b.cmp(a))
}

pub fn check_ssa(orbit: &OrbitSpaceModel) -> Result<SsaOutcome> {
    if orbit.cells.is_empty() {
        return Err(Error::Input("orbit space has no cells".into()));
    }
    let mut chars: Vec<&Character> = orbit.supports.keys().collect();
    chars.sort_by(|a, b| witness_order(a, b));
    for chi in &chars {
        if !orbit.is_clopen(&orbit.supports[*chi]) {
            return Ok(SsaOutcome {
                verdict: Verdict::Fail,
                witness: Some((*chi).clone()),
                characters_checked: chars.len(),
            });
        }
    }
    Ok(SsaOutcome {
        verdict: Verdict::Pass,
        witness: None,
        characters_checked: chars.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(k: i64) -> Vec<Character> {
        (-k..=k).map(|j| Character::new(&[j])).collect()
    }

    #[test]
    fn sphere_with_poles_fails_at_one() {
        let mut orbit = OrbitSpaceModel::closed_interval("N", "(0,pi)", "S");
        for chi in chars(3) {
            if chi.is_zero() {
                orbit.set_full_support(chi);
            } else {
                orbit.set_open_support(chi);
            }
        }
        let out = check_ssa(&orbit).unwrap();
        assert_eq!(out.verdict, Verdict::Fail);
        assert_eq!(out.witness, Some(Character::new(&[1])));
    }

    #[test]
    fn punctured_sphere_passes() {
        let mut orbit = OrbitSpaceModel::open_interval("(0,pi)");
        for chi in chars(3) {
            orbit.set_open_support(chi);
        }
        assert_eq!(check_ssa(&orbit).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn free_circle_passes() {
        let mut orbit = OrbitSpaceModel::circle("(0,1)");
        for chi in chars(2) {
            orbit.set_full_support(chi);
        }
        assert_eq!(check_ssa(&orbit).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn adjacent_points_rejected() {
        assert!(OrbitSpaceModel::new(vec![Cell::point("a"), Cell::point("b")], false).is_err());
        assert!(OrbitSpaceModel::new(vec![], false).is_err());
    }
}
