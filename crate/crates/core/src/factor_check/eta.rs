use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graded_core::{GradedMatrix, Parity};
use crate::models::EquivariantTriple;
use crate::sectors::{Character, SectorOperator};

/// The pair (ζ, η) of the right-hand module, with η given on the generators
/// of ℂl_n through E_j = i·η(c(dtʲ)).
#[derive(Clone, Debug)]
pub struct EtaData {
    pub generators: Vec<SectorOperator>,
    pub zeta: Character,
}

/// Worst blockwise defects of the ℂl_n relations for E_j.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EtaDiagnostics {
    pub self_adjoint_defect: f64,
    /// max |E_jE_k + E_kE_j − 2δ_jk|
    pub clifford_defect: f64,
    pub shift_zero: bool,
    pub odd: bool,
}

impl EtaData {
    pub fn new(generators: Vec<SectorOperator>, zeta: Character) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Input("η needs at least one generator".into()))?;
        let window = *first.space().window();
        if zeta.n() != window.n() {
            return Err(Error::Dimension {
                context: "ζ rank",
                expected: window.n(),
                found: zeta.n(),
            });
        }
        window.require(&zeta)?;
        Ok(EtaData { generators, zeta })
    }

    pub fn from_triple(triple: &EquivariantTriple, zeta: &Character) -> Result<Self> {
        Self::new(triple.eta.clone(), zeta.clone())
    }

    pub fn diagnostics(&self) -> Result<EtaDiagnostics> {
        let zero = Character::zero(self.zeta.n());
        let mut sa: f64 = 0.0;
        let mut cl: f64 = 0.0;
        let mut shift_zero = true;
        let mut odd = true;
        for (j, e) in self.generators.iter().enumerate() {
            shift_zero &= e.shifts().iter().all(|s| *s == zero);
            odd &= e.parity() == Parity::Odd;
            sa = sa.max(e.self_adjoint_defect()?);
            for f in &self.generators[j..] {
                let anti = e.compose(f)?.add(&f.compose(e)?)?;
                let same = core::ptr::eq(e, f);
                for (_, _, b) in anti.blocks() {
                    let target = if same {
                        GradedMatrix::identity(b.even_dim(), b.odd_dim()).scale_real(2.0)
                    } else {
                        GradedMatrix::zero(b.rows(), b.cols(), b.parity())
                    };
                    cl = cl.max(b.max_abs_diff(&target));
                }
            }
        }
        Ok(EtaDiagnostics {
            self_adjoint_defect: sa,
            clifford_defect: cl,
            shift_zero,
            odd,
        })
    }
}
