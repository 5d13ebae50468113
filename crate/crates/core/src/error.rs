//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model evaluation, reductions, root machinery, and the
/// integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A pairwise particle separation fell below the evaluation threshold.
    #[error("pairwise separation {min_sep:e} below threshold {threshold:e}")]
    SeparationTooSmall { min_sep: f64, threshold: f64 },

    /// The physical-model frequency must be positive for the transformation.
    #[error("omega must be positive, got {0}")]
    InvalidOmega(f64),

    /// The complexified time does not lie on the image of real time.
    #[error("tau off the real-time curve: |2 omega tau| = {modulus} (expected 1)")]
    TauOffCurve { modulus: f64 },

    /// The semi-symmetric constant mu hit one of its excluded values.
    #[error("mu = {0} is excluded (1/4 and 1 are singular for this case)")]
    MuExcluded(f64),

    /// A non-integer power needs a positive real base on the real branch.
    #[error("non-integer exponent requires positive real base, got {base}")]
    NegativeBase { base: f64 },

    /// The quadratic root pair of the c = 0 case degenerated (4k^2 = 1).
    #[error("degenerate root pair: 4k^2 - 1 = {0:e}")]
    DegenerateRoot(f64),

    /// The cubic denominator has (numerically) repeated roots.
    #[error("repeated cubic roots: |discriminant| = {0:e} below threshold")]
    DegenerateRoots(f64),

    /// The constant k = (a+b)/(sqrt(3)(a-b)) requires a != b.
    #[error("k is undefined for equal couplings a = b = {0}")]
    EqualCouplings(f64),

    /// The constant mu = (2a+c)/(8a+c) requires a = b and 8a + c != 0.
    #[error("mu is undefined for couplings a = {a}, b = {b}, c = {c}")]
    NotSemiSymmetric { a: f64, b: f64, c: f64 },

    /// The p, q parameters require c != 0.
    #[error("coupling c must be nonzero for the cubic parameters")]
    ZeroCouplingC,

    /// The state lies on a singular direction of the general first integral.
    #[error("state lies on a singular direction (theta_real = {theta_real})")]
    SingularDirection { theta_real: f64 },

    /// A denominator of the reduced planar flow vanished.
    #[error("reduced flow singular: {0}")]
    ReducedSingular(String),

    /// The characteristic slope denominator vanished.
    #[error("characteristic slope is vertical (denominator {0:e})")]
    VerticalSlope(f64),

    /// The conformal factor denominator vanished.
    #[error("conformal factor singular: eta (3 xi^2 - eta^2) = {0:e}")]
    ConformalSingular(f64),

    /// The reduced potential requires all log arguments positive.
    #[error("log argument not positive: {0}")]
    NonPositiveLogArgument(f64),

    /// The extended Hamiltonian 1/2 ln H2 needs H2 != 0.
    #[error("H2 vanishes at the requested point")]
    VanishingH2,

    /// No cube-root branch reproduced the cubic roots within tolerance.
    #[error("no cube-root branch yields valid roots (best residual {0:e})")]
    NoValidBranch(f64),

    /// Trajectory operations need at least one sample.
    #[error("empty trajectory")]
    EmptyTrajectory,

    /// Invalid integration or verification configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
