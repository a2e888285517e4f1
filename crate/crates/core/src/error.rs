use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("constant term vanishes: |p(0,0)| = {0:e}")]
    ZeroConstantTerm(f64),

    #[error("slice is degenerate at {0}")]
    DegenerateSlice(String),

    #[error("root iteration did not converge after {iterations} steps (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("denominator is not stable: slice root of modulus {min_root_modulus} found")]
    UnstableDenominator { min_root_modulus: f64 },

    #[error("denominator vanishes at the evaluation point (|p| = {0:e})")]
    DenominatorVanishes(f64),

    #[error("only {found} valid samples, {required} required")]
    InsufficientSamples { found: usize, required: usize },

    #[error("exponent {0} is outside the supported range p >= 1")]
    InvalidExponent(f64),

    #[error("point is too close to the boundary of the bidisk (max modulus {0})")]
    PointTooCloseToBoundary(f64),

    #[error("evaluation point is a singularity of the function")]
    SingularEvaluationPoint,

    #[error("input lies on the pole of the map")]
    PoleInput,

    #[error("gradient vanishes along the level curve")]
    FlatGradient,

    #[error("start point is off the requested level (residual {0:e})")]
    StartOffLevel(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
