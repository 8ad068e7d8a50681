//! Z₂-graded linear algebra: Clifford algebras, spinor representations,
//! Koszul-signed tensor products and graded commutators.

mod clifford;
mod matrix;
mod parity;
mod spd;
mod spinor;

pub use clifford::CliffordElement;
pub use matrix::{graded_commutator, graded_tensor, tensor_layout, GradedMatrix};
pub use parity::Parity;
pub use spd::inverse_sqrt_spd;
pub use spinor::{spinor_rep, SpinorRep};
