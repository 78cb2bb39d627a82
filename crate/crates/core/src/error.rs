use crate::focp::FocpSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("fractional order must satisfy 0 < alpha <= 1, got {0}")]
    InvalidOrder(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state became non-finite at node {node} (t = {t})")]
    NonFiniteState { node: usize, t: f64 },

    #[error("Mittag-Leffler series did not converge within {terms} terms")]
    NoConvergence { terms: usize },

    #[error("R0 denominator is not positive ({0}); parameters outside the meaningful regime")]
    DegenerateDenominator(f64),

    #[error("no endemic equilibrium: R0 = {r0} <= 1")]
    NoEndemicEquilibrium { r0: f64 },

    #[error("invariant violated: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("grids differ between inputs")]
    GridMismatch,

    #[error("initial infectious count I(0) must be positive")]
    ZeroInitialInfectious,

    #[error("forward-backward sweep did not converge after {} iterations", .0.iterations)]
    NotConverged(Box<FocpSolution>),
}
