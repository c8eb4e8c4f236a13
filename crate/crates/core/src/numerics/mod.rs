//! Linear solver and quadrature used by the time stepper.

mod banded;
mod quadrature;

pub use banded::SparseSystem;
pub use quadrature::{CompensatedSum, QuadratureRule};
