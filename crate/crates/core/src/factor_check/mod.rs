//! Checks of the factorisation conditions on an assembled equivariant triple.

mod certificate;
mod conditions;
mod constructive;
mod eta;
mod positivity;
mod report;
mod ssa;
mod verdict;

pub use certificate::{lower_bound_certificate, Certificate, CertificateCheck};
pub use conditions::{check_condition1, check_condition2, condition2_probe, Condition1Outcome, Condition2Outcome, Condition2Row};
pub use constructive::{constructive_product, fit_slope, ConstructiveProduct, GapReport, GapRow};
pub use eta::{EtaData, EtaDiagnostics};
pub use positivity::{
    positivity_scan, product_operator, product_operator_from_metric, quadratic_form, PositivityOutcome, SectorMinimum,
};
pub use report::{run_full_check, CheckOptions, CheckReport, CheckSet};
pub use ssa::{check_ssa, witness_order, Cell, CellKind, OrbitSpaceModel, SsaOutcome};
pub use verdict::{banded, Verdict};
