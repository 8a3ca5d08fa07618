//! Exact distributions of the shortest path distance to the nearest Cox
//! point, from the typical intersection and from the typical point.

mod intersection;
pub mod quad;
mod typical;

pub use intersection::cdf_intersection;
pub use quad::{integrate_2d, integrate_adaptive, try_integrate, try_integrate_pieces, QuadSpec};
pub use typical::{
    cdf_typical_assembled, cdf_typical_theorem2, cdf_w1, cdf_w1_branch1, cdf_w1_branch2, cdf_w2, cdf_w2_branch1,
    cdf_w2_branch2, cond_cdf_rm, conditional_cdf_rm, pdf_s, pdf_x1, pdf_x1x2, pdf_x2, prob_event, ConditioningState,
    EventId,
};

use crate::error::{Error, Result};
use crate::geom::ModelParams;
use crate::sampler::Palm;

/// Overshoot beyond `[0, 1]` that is treated as rounding.
pub const CLAMP_SLACK: f64 = 1e-10;

pub(crate) fn clamp_probability(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if v < 0.0 && v > -CLAMP_SLACK {
        Ok(0.0)
    } else if v > 1.0 && v < 1.0 + CLAMP_SLACK {
        Ok(1.0)
    } else {
        Err(Error::ProbabilityOutOfRange(v))
    }
}

/// The analytic CDF for a reference point: the closed form for the typical
/// intersection and the integral form for the typical point.
pub fn cdf(mode: Palm, r: f64, params: &ModelParams, quad: &QuadSpec) -> Result<f64> {
    match mode {
        Palm::TypicalIntersection => cdf_intersection(r, params),
        Palm::TypicalPoint => cdf_typical_theorem2(r, params, quad),
    }
}

/// Smallest `r` with `F(r) >= p`, to within `1e-12` relative, by bisection.
pub fn quantile<F>(mut cdf: F, p: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    let mut hi = 1.0;
    while cdf(hi)? < p {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidArgument("CDF does not reach the requested level".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
