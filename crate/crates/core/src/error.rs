use thiserror::Error;

use crate::geom::Density;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} must be strictly positive and finite")]
    NonPositiveDensity(Density),

    #[error("window half-width must be strictly positive and finite, got {0}")]
    InvalidWindow(f64),

    #[error("CDF values are not a valid distribution: {0}")]
    InvalidCurve(String),

    #[error("line set is already Palm-conditioned")]
    AlreadyConditioned,

    #[error("the origin does not lie on any line; Palm-condition the line set first")]
    OriginNotOnNetwork,

    #[error("the network contains no Cox point")]
    NoPointFound,

    #[error("window half-width {half_width} km exceeds the cap of {cap} km")]
    WindowOverflow { half_width: f64, cap: f64 },

    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("conditioning state requires 0 <= x1 <= x2 < inf, got x1 = {x1}, x2 = {x2}")]
    InvalidState { x1: f64, x2: f64 },

    #[error("argument {w} lies outside the domain of this branch [{lo}, {hi}]")]
    BranchDomain { w: f64, lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error}")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("probability {0} lies outside [0, 1] beyond rounding slack")]
    ProbabilityOutOfRange(f64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("empirical and analytic curves are evaluated on different grids")]
    GridMismatch,
}
