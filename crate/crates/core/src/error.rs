use thiserror::Error;

/// Every failure the library can report. Variants carry the measured
/// quantities so callers (and the CLI) can print useful diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("derivative order {0} is not supported (maximum 3)")]
    UnsupportedOrder(usize),

    #[error("degenerate cutoff: normalisation integral {0:e} is below 1e-12")]
    DegenerateCutoff(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resolution too coarse: rho0 = {rho0} < 4 * resolution = {limit}")]
    ResolutionTooCoarse { rho0: f64, limit: f64 },

    #[error("resolution underflow: generator would emit pitch {0:e}")]
    ResolutionUnderflow(f64),

    #[error("porosity destroyed: inflation radius {rho} >= nu * rho0 = {limit}")]
    PorosityDestroyed { rho: f64, limit: f64 },

    #[error("set is not {r}-separated: found two points at distance {dist}")]
    NotSeparated { r: f64, dist: f64 },

    #[error("quadrature extent {extent} does not cover support radius {support}")]
    TruncatedSupport { extent: f64, support: f64 },

    #[error("singular integrand: field does not vanish near the origin on the line at angle {theta}")]
    SingularIntegrand { theta: f64 },

    #[error("quadrature inconsistency: {a} vs {b} exceeds tolerance {tol:e}")]
    QuadratureInconsistency { a: f64, b: f64, tol: f64 },

    #[error("point ({x}, {y}) lies outside B(0, {bound})")]
    Domain { x: f64, y: f64, bound: f64 },

    #[error("condition {condition} violated: {detail}")]
    ConditionViolation { condition: String, detail: String },

    #[error("lower bound violated at ({x}, {y}): weight {value} > bound {bound}")]
    LowerBoundViolation {
        x: f64,
        y: f64,
        value: f64,
        bound: f64,
    },

    #[error("angular profile fit for piece k = {k}: residual {residual:e} exceeds {tol:e}")]
    ProfileFit { k: u32, residual: f64, tol: f64 },

    #[error("sigma bracket failed to pass after {doublings} doublings (upper = {upper})")]
    BracketExpansion { doublings: u32, upper: f64 },

    #[error("|y| = {y} is below the finite-difference limit {min}")]
    TooCloseToRealSlice { y: f64, min: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
