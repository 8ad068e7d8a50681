//! Desk-scale equivariant spectral triples.
//!
//! Conventions shared by every model:
//! - sector k holds functions behaving like e^{−2πik·t} along the orbits, so
//!   the generator A_j acts on sector k as 2πk_j;
//! - Clifford multiplication by a unit covector is c(e^a) = iΓ_a with Γ_a
//!   self-adjoint, so c(e^a)² = −1;
//! - η is stored through its self-adjoint generators E_j = i·η(c(dtʲ)), for
//!   which the product operator reads M_k = Σ_j E_j·2π(k_j − ℓ_j).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::Result;
use crate::factor_check::OrbitSpaceModel;
use crate::graded_core::{GradedMatrix, Parity};
use crate::sectors::{Character, SectorOperator, SectorSpace};
use crate::sparse::SparseMatrix;

mod deform;
mod nc_torus;
mod odd;
mod profile;
mod sphere;
mod torus;
mod warped;

pub use deform::{deform, DeformedModel};
pub use nc_torus::{apply_monomial, build_nc_torus, NCTorusGenerators, RelationCheck, ThetaMatrix, Turn};
pub use odd::{cl1_generator, double_block, double_odd};
pub use profile::Profile;
pub use sphere::{build_sphere, SphereConfig, SphereModel};
pub use torus::{build_torus, TorusDiracModel};
pub use warped::{build_warped_torus, WarpedTorusConfig, WarpedTorusModel};

/// Smooth bump exp(1 − 1/(1 − r²)) with r = distance/half_width, peak 1.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    /// Distance measured on the unit circle R/Z.
    pub periodic: bool,
}

impl Bump {
    pub fn value(&self, x: f64) -> f64 {
        let mut d = (x - self.center).abs();
        if self.periodic {
            d %= 1.0;
            d = d.min(1.0 - d);
        }
        let r = d / self.half_width;
        if r >= 1.0 {
            0.0
        } else {
            libm::exp(1.0 - 1.0 / (1.0 - r * r))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// Multiplication by a function of the orbit coordinate times a character.
#[derive(Clone, Debug)]
pub struct AlgebraSample {
    pub label: String,
    pub shift: Character,
    /// `None` means the constant function 1.
    pub bump: Option<Bump>,
    pub op: SectorOperator,
}

/// Pointwise metric data along the orbits, all as shift-0 operators.
#[derive(Clone, Debug)]
pub struct MetricData {
    /// W^{rj} = (h^{-1/2})_{rj}
    pub w: Vec<Vec<SectorOperator>>,
    /// h^{rj} = (h^{-1})_{rj}
    pub h_inverse: Vec<Vec<SectorOperator>>,
    /// c(X_r♭)
    pub clifford_flat: Vec<SectorOperator>,
    /// ∇_{X_j} on spinors, including −2πik_j from the orbit derivative.
    pub connection: Vec<SectorOperator>,
}

/// Scalars extracted from the geometry for certificates and oracles.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GeometrySummary {
    /// min over the grid of the smallest eigenvalue of W
    pub w_min_eigenvalue: f64,
    /// max over the grid of max_{j,p} |W^{jp}|
    pub w_sup_entry: f64,
    /// per direction, sup over the grid of ‖W ω_j‖ (endomorphism part of ∇_{X_j})
    pub endomorphism_sup: Vec<f64>,
    /// per grid point, the values 1 − 1/f_j (diagonal W − h⁻¹ times f_j)
    pub orbit_defect: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GridInfo {
    pub points: usize,
    pub spacing: f64,
    pub margin: Option<f64>,
}

/// Everything the checkers consume.
#[derive(Clone, Debug)]
pub struct EquivariantTriple {
    pub label: String,
    pub space: Arc<SectorSpace>,
    pub dirac: SectorOperator,
    /// E_j = i·η(c(dtʲ)): odd, self-adjoint, unitary, pairwise anticommuting.
    pub eta: Vec<SectorOperator>,
    pub generators: Vec<SectorOperator>,
    pub metric: Option<MetricData>,
    pub geometry: Option<GeometrySummary>,
    pub orbit: OrbitSpaceModel,
    pub fixed_point_samples: Vec<AlgebraSample>,
    pub algebra_samples: Vec<AlgebraSample>,
    pub grid: Option<GridInfo>,
    pub metadata: BTreeMap<String, String>,
}

impl EquivariantTriple {
    pub fn rank(&self) -> usize {
        self.space.window().n()
    }
}

pub trait EquivariantModel {
    fn triple(&self) -> &EquivariantTriple;

    /// The same model one grid refinement finer.
    fn refined(&self) -> Result<Self>
    where
        Self: Sized;

    /// Closed-form value of ‖[D, E_j]± a P_ζ‖ when the model has one.
    fn analytic_condition2(&self, _sample: &AlgebraSample, _zeta: &Character, _generator: usize) -> Option<f64> {
        None
    }
}

/// A_j = Σ_k 2πk_j P_k
pub(crate) fn generator_ops(space: &Arc<SectorSpace>) -> Result<Vec<SectorOperator>> {
    (0..space.window().n())
        .map(|j| {
            SectorOperator::diagonal(space, Parity::Even, |k| {
                let (e, o) = space.block_dims(k)?;
                Ok(GradedMatrix::identity(e, o).scale_real(2.0 * PI * k.0[j] as f64))
            })
        })
        .collect()
}

/// Shift-μ operator whose block at every source is `block`.
pub(crate) fn constant_shift(
    space: &Arc<SectorSpace>,
    shift: &Character,
    block: &GradedMatrix,
) -> Result<SectorOperator> {
    SectorOperator::shifted(space, shift, block.parity(), |_| Ok(Some(block.clone())))
}

/// Shift-0 operator with the same block everywhere.
pub(crate) fn constant_diagonal(space: &Arc<SectorSpace>, block: &GradedMatrix) -> Result<SectorOperator> {
    SectorOperator::diagonal(space, block.parity(), |_| Ok(block.clone()))
}

pub(crate) fn real_diag(values: &[f64]) -> SparseMatrix {
    SparseMatrix::from_real_diagonal(values)
}

pub(crate) fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Characters with all |k_j| ≤ bound, in window order.
pub(crate) fn small_characters(space: &SectorSpace, bound: i64) -> Vec<Character> {
    space.window().characters().into_iter().filter(|k| k.max_abs() <= bound).collect()
}
