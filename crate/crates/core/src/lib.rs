//! Dynamics, first integrals, and Poisson structures of an Aristotelian
//! (first-order) model of three-body motion in the complex plane.
//!
//! The crate implements two equivalent vector fields — a "physical" model with
//! a linear rotation term and an "auxiliary" model with pure two-body
//! interactions — together with the change of variables connecting them, the
//! conserved quantities of both, the planar reduction of the flow, explicit
//! Poisson tensors in three and four dimensions, the cubic root machinery that
//! classifies coupling constants, an adaptive Runge-Kutta integrator over
//! complex states, and a verification engine that audits every implemented
//! identity numerically.
//!
//! Identities are audited as stated; when one fails, a fixed list of candidate
//! corrections (index permutation, sign flip, constant rescale) is tried and
//! the passing variant is reported with a note rather than silently applied.

pub mod conserved;
pub mod error;
pub mod integrator;
pub mod model;
mod numdiff;
pub mod poisson;
pub mod reduction;
pub mod roots;
pub mod verify;

pub use error::ModelError;
pub use model::{Couplings, ExtendedPoint, State3};
pub use poisson::CheckResult;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

pub(crate) const SQRT3: f64 = 1.7320508075688772935274463415058723669;
pub(crate) const SQRT6: f64 = 2.4494897427831780981972840747058913920;
