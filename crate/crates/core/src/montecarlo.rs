//! Seeded trial batches, empirical CDFs with DKW bands, and comparison
//! against the analytic curves.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, QuadSpec};
use crate::error::{Error, Result};
use crate::geom::{CdfCurve, ModelParams};
use crate::pathnet::{simulate_distance_with, SimConfig};
use crate::sampler::Palm;

/// Confidence level of the DKW band attached to empirical curves.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Allowance for quadrature and grid effects on top of the DKW band.
pub const QUADRATURE_SLACK: f64 = 0.002;

/// Number of grid points used when none is given.
pub const DEFAULT_GRID_POINTS: usize = 200;

/// Grid upper end, as a quantile of the analytic CDF.
pub const GRID_QUANTILE: f64 = 0.999;

pub const MIN_TRIALS: usize = 100;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "MANHATTAN_COX_THREADS";

/// Worker count: `MANHATTAN_COX_THREADS` when set to a positive integer,
/// otherwise every available core.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `n_trials` independent trials with seeds `seed, seed + 1, ...` and
/// returns the distances in trial order.
pub fn simulate_batch(params: &ModelParams, mode: Palm, n_trials: usize, seed: u64) -> Result<Vec<f64>> {
    let config = SimConfig::default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|i| simulate_distance_with(params, mode, seed.wrapping_add(i), &config).map(|r| r.distance))
            .collect()
    })
}

/// Right-continuous empirical CDF of `samples` evaluated on `grid`.
pub fn empirical_values(samples: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    grid.iter()
        .map(|&g| sorted.partition_point(|&s| s <= g) as f64 / n)
        .collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "grid must be non-empty and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Empirical CDF of the path distance from `n_trials` simulated trials.
pub fn estimate_cdf(params: &ModelParams, mode: Palm, n_trials: usize, grid: &[f64], seed: u64) -> Result<CdfCurve> {
    if n_trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_TRIALS} trials are required"
        )));
    }
    check_grid(grid)?;
    let samples = simulate_batch(params, mode, n_trials, seed)?;
    CdfCurve::empirical(grid.to_vec(), empirical_values(&samples, grid), n_trials, DEFAULT_ALPHA)
}

/// The analytic CDF for `mode` on `grid`.
pub fn analytic_curve(mode: Palm, params: &ModelParams, grid: &[f64], quad: &QuadSpec) -> Result<CdfCurve> {
    check_grid(grid)?;
    let values = grid
        .par_iter()
        .map(|&r| analytic::cdf(mode, r, params, quad))
        .collect::<Result<Vec<_>>>()?;
    CdfCurve::analytic(grid.to_vec(), values)
}

/// `n_points` uniform points from 0 to the 99.9th percentile of the
/// analytic CDF.
pub fn default_grid(mode: Palm, params: &ModelParams, quad: &QuadSpec, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("a grid needs at least two points".into()));
    }
    // The quantile only sets the plotting range, so a looser tolerance is
    // plenty for the bisection.
    let coarse = QuadSpec {
        abs_tol: quad.abs_tol.max(1e-7),
        ..*quad
    };
    let top = analytic::quantile(|r| analytic::cdf(mode, r, params, &coarse), GRID_QUANTILE)?;
    let step = top / (n_points - 1) as f64;
    Ok((0..n_points).map(|i| i as f64 * step).collect())
}

/// Outcome of an empirical-versus-analytic comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub regime: String,
    pub mode: Option<Palm>,
    pub seed: Option<u64>,
    pub n_trials: usize,
    pub ks_statistic: f64,
    pub dkw_halfwidth: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Grid distance where the largest deviation occurs.
    pub max_deviation_at: f64,
    pub max_deviation_index: usize,
}

impl ValidationReport {
    pub fn with_context(mut self, regime: impl Into<String>, mode: Palm, seed: u64) -> Self {
        self.regime = regime.into();
        self.mode = Some(mode);
        self.seed = Some(seed);
        self
    }
}

/// Largest absolute gap between the two curves over their common grid.
/// Passes when the gap is within the DKW half-width plus
/// [`QUADRATURE_SLACK`].
pub fn ks_compare(empirical: &CdfCurve, analytic: &CdfCurve) -> Result<ValidationReport> {
    let dkw = empirical.dkw_halfwidth().unwrap_or(0.0);
    ks_compare_with(empirical, analytic, dkw + QUADRATURE_SLACK)
}

pub fn ks_compare_with(empirical: &CdfCurve, analytic: &CdfCurve, tolerance: f64) -> Result<ValidationReport> {
    if empirical.grid() != analytic.grid() {
        return Err(Error::GridMismatch);
    }
    let (index, ks) = empirical
        .values()
        .iter()
        .zip(analytic.values())
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    Ok(ValidationReport {
        regime: String::new(),
        mode: None,
        seed: None,
        n_trials: empirical.n_trials().unwrap_or(0),
        ks_statistic: ks,
        dkw_halfwidth: empirical.dkw_halfwidth().unwrap_or(0.0),
        tolerance,
        pass: ks <= tolerance,
        max_deviation_at: empirical.grid().get(index).copied().unwrap_or(0.0),
        max_deviation_index: index,
    })
}

/// A complete validation run: both curves and the comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub report: ValidationReport,
    pub empirical: CdfCurve,
    pub analytic: CdfCurve,
}

/// Simulates `n_trials` trials, evaluates the analytic CDF on the default
/// grid of `grid_points` points, and compares them.
pub fn validate(
    regime: &str,
    params: &ModelParams,
    mode: Palm,
    n_trials: usize,
    seed: u64,
    grid_points: usize,
    quad: &QuadSpec,
) -> Result<Validation> {
    let grid = default_grid(mode, params, quad, grid_points)?;
    let analytic = analytic_curve(mode, params, &grid, quad)?;
    let empirical = estimate_cdf(params, mode, n_trials, &grid, seed)?;
    let report = ks_compare(&empirical, &analytic)?.with_context(regime, mode, seed);
    Ok(Validation {
        report,
        empirical,
        analytic,
    })
}
