use crate::error::{Error, Result};
use crate::geom::ModelParams;

/// Exponent `g(t)` with `P(T > t) = exp(g(t))`.
///
/// The L1 ball of radius `t` around the crossing must be void: the two axis
/// lines contribute `-2 lambda_c t` each, and every other line at distance
/// `u < t` meets the ball in a segment of length `2 (t - u)`.
pub(crate) fn intersection_log_survival(t: f64, params: &ModelParams) -> f64 {
    let (l, c) = (params.lambda_l(), params.lambda_c());
    -4.0 * c * t - 4.0 * l * t - (2.0 * l / c) * (-2.0 * c * t).exp_m1()
}

/// CDF of the shortest path distance from the typical intersection to the
/// nearest Cox point.
pub fn cdf_intersection(t: f64, params: &ModelParams) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeDistance(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(-intersection_log_survival(t, params).exp_m1())
}
