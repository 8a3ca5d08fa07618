//! Value types shared by the sampler, the path network and the analytic
//! distributions.
//!
//! All lengths are in kilometres and all densities are per kilometre.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names one of the two model densities in error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    LambdaL,
    LambdaC,
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::LambdaL => f.write_str("lambda_l"),
            Density::LambdaC => f.write_str("lambda_c"),
        }
    }
}

/// Line density `lambda_l` (lines per km along each axis) and point density
/// `lambda_c` (points per km along every line).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    lambda_l: f64,
    lambda_c: f64,
}

impl ModelParams {
    pub fn new(lambda_l: f64, lambda_c: f64) -> Result<Self> {
        validate_params(lambda_l, lambda_c)
    }

    pub fn lambda_l(&self) -> f64 {
        self.lambda_l
    }

    pub fn lambda_c(&self) -> f64 {
        self.lambda_c
    }

    /// Mean line length per unit area of the line process, `2 lambda_l`.
    pub fn mu_l(&self) -> f64 {
        2.0 * self.lambda_l
    }
}

pub fn validate_params(lambda_l: f64, lambda_c: f64) -> Result<ModelParams> {
    if !(lambda_l > 0.0 && lambda_l.is_finite()) {
        return Err(Error::NonPositiveDensity(Density::LambdaL));
    }
    if !(lambda_c > 0.0 && lambda_c.is_finite()) {
        return Err(Error::NonPositiveDensity(Density::LambdaC));
    }
    Ok(ModelParams { lambda_l, lambda_c })
}

/// The closed square `[-half_width, half_width]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    half_width: f64,
}

impl Window {
    pub fn new(half_width: f64) -> Result<Self> {
        if half_width > 0.0 && half_width.is_finite() {
            Ok(Window { half_width })
        } else {
            Err(Error::InvalidWindow(half_width))
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn side(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn contains(&self, coord: f64) -> bool {
        coord.abs() <= self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// An axis-parallel line. `offset` is the y-intercept of a horizontal line
/// and the x-intercept of a vertical one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub orientation: Orientation,
    pub offset: f64,
    pub palm_added: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Analytic,
    Empirical,
}

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz band at confidence `1 - alpha`.
pub fn dkw_halfwidth(n_trials: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n_trials as f64)).sqrt()
}

/// A CDF sampled on a strictly increasing distance grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    kind: CurveKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dkw_halfwidth: Option<f64>,
}

/// Decrements smaller than this are rounding noise and get flattened.
const MONOTONE_SLACK: f64 = 1e-12;

impl CdfCurve {
    pub fn analytic(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let values = check_curve(&grid, values)?;
        Ok(CdfCurve {
            grid,
            values,
            kind: CurveKind::Analytic,
            n_trials: None,
            dkw_halfwidth: None,
        })
    }

    /// An empirical curve from `n_trials` samples with a DKW band at level
    /// `alpha`.
    pub fn empirical(grid: Vec<f64>, values: Vec<f64>, n_trials: usize, alpha: f64) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::InvalidArgument(
                "an empirical curve needs at least one trial".into(),
            ));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let values = check_curve(&grid, values)?;
        Ok(CdfCurve {
            grid,
            values,
            kind: CurveKind::Empirical,
            n_trials: Some(n_trials),
            dkw_halfwidth: Some(dkw_halfwidth(n_trials, alpha)),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn n_trials(&self) -> Option<usize> {
        self.n_trials
    }

    pub fn dkw_halfwidth(&self) -> Option<f64> {
        self.dkw_halfwidth
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

fn check_curve(grid: &[f64], mut values: Vec<f64>) -> Result<Vec<f64>> {
    if grid.len() != values.len() {
        return Err(Error::InvalidCurve(format!(
            "grid has {} points but {} values were given",
            grid.len(),
            values.len()
        )));
    }
    if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidCurve(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    for i in 0..values.len() {
        let v = values[i];
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidCurve(format!("value {v} at index {i} is outside [0, 1]")));
        }
        if i > 0 && v < values[i - 1] {
            if values[i - 1] - v < MONOTONE_SLACK {
                values[i] = values[i - 1];
            } else {
                return Err(Error::InvalidCurve(format!(
                    "values decrease from {} to {v} at index {i}",
                    values[i - 1]
                )));
            }
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_params_validate() {
        let dense = validate_params(10.0, 3.0).unwrap();
        assert_eq!(dense.mu_l(), 20.0);
        let sparse = validate_params(1.0, 0.5).unwrap();
        assert_eq!(sparse.mu_l(), 2.0);
    }

    #[test]
    fn rejects_non_positive_densities() {
        assert_eq!(
            validate_params(0.0, 1.0),
            Err(Error::NonPositiveDensity(Density::LambdaL))
        );
        assert_eq!(
            validate_params(1.0, -2.0),
            Err(Error::NonPositiveDensity(Density::LambdaC))
        );
        assert_eq!(
            validate_params(f64::NAN, 1.0),
            Err(Error::NonPositiveDensity(Density::LambdaL))
        );
        assert_eq!(
            validate_params(1.0, f64::INFINITY),
            Err(Error::NonPositiveDensity(Density::LambdaC))
        );
    }

    #[test]
    fn window_rejects_bad_widths() {
        assert!(Window::new(0.0).is_err());
        assert!(Window::new(-1.0).is_err());
        assert_eq!(Window::new(2.5).unwrap().side(), 5.0);
    }

    #[test]
    fn curve_flattens_rounding_noise_only() {
        let c = CdfCurve::analytic(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.5 - 1e-13]).unwrap();
        assert_eq!(c.values(), &[0.0, 0.5, 0.5]);
        assert!(CdfCurve::analytic(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.4]).is_err());
    }

    #[test]
    fn curve_rejects_bad_shapes() {
        assert!(CdfCurve::analytic(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(CdfCurve::analytic(vec![0.0, 0.0], vec![0.0, 0.1]).is_err());
        assert!(CdfCurve::analytic(vec![0.0, 1.0], vec![0.0, 1.5]).is_err());
        assert!(CdfCurve::analytic(vec![0.0, 1.0], vec![-0.1, 0.5]).is_err());
    }

    #[test]
    fn empirical_curve_carries_dkw_band() {
        let c = CdfCurve::empirical(vec![0.0, 1.0], vec![0.0, 1.0], 100_000, 0.05).unwrap();
        let expected = ((2.0f64 / 0.05).ln() / 200_000.0).sqrt();
        assert_eq!(c.dkw_halfwidth(), Some(expected));
        assert!((expected - 0.00429).abs() < 5e-6);
        assert_eq!(c.n_trials(), Some(100_000));
    }
}
