//! Axially symmetric, volume-preserving anisotropic mean curvature flow of a
//! drop trapped between two horizontal plates.
//!
//! The generating curve `r(z)`, `z in [0, 1]`, is a clamped cubic spline that
//! meets both plates at a right angle. It is advanced with a semi-implicit
//! backward Euler scheme for
//!
//! ```text
//! r_t = (Lambda - lambda_bar) sqrt(1 + r_z^2)
//! ```
//!
//! where `Lambda` is the anisotropic mean curvature of the Rapini-Papoular
//! energy `gamma = 1 + eps nu3^2` and `lambda_bar` its surface average.

pub mod anisotropy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod numerics;
pub mod spline;
pub mod stepper;

pub use anisotropy::{AnisotropyKind, AnisotropyModel};
pub use error::{FlowError, Result};
pub use experiments::{
    preset, run, write_outputs, FlowConfig, InitialProfile, Outcome, RunHistory, Snapshot,
};
pub use geometry::{integrals, lambda_pointwise, IntegralReport, ProfilePoint};
pub use numerics::{QuadratureRule, SparseSystem};
pub use spline::ClampedSpline;
pub use stepper::{FlowState, StepCoefficients, Stepper};
