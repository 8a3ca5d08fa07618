//! `manhattan-cox`: validation runs and analytic curve export.
//!
//! Exit codes: 0 success, 1 validation failed, 2 configuration error,
//! 3 runtime failure (numerics or I/O).

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use manhattan_cox::analytic::{cdf_typical_assembled, QuadSpec};
use manhattan_cox::montecarlo;

use config::{ConfigError, Format, Mode, Partial, RunConfig};
use output::CurveRow;

/// Largest gap tolerated between the two typical-point routes.
const ROUTE_TOLERANCE: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "manhattan-cox",
    version,
    about = "Nearest-point path distances in the Manhattan Poisson line Cox process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate trials and compare the empirical CDF with the analytic one.
    Validate(RunArgs),
    /// Write the analytic CDF on a grid.
    Curve(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// dl-dp, dl-sp, sl-dp or sl-sp, optionally suffixed with -intersection or -typical.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Line density, per km.
    #[arg(long, allow_negative_numbers = true)]
    lambda_l: Option<f64>,
    /// Point density along each line, per km.
    #[arg(long, allow_negative_numbers = true)]
    lambda_c: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Upper end of the grid; defaults to the 99.9th percentile.
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<f64>,
    /// Output file, `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for a .json output path, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => Partial::from_file(path)?,
            None => Partial::default(),
        };
        let flags = Partial {
            preset: self.preset,
            mode: self.mode,
            lambda_l: self.lambda_l,
            lambda_c: self.lambda_c,
            trials: self.trials,
            seed: self.seed,
            grid_points: self.grid_points,
            r_max: self.r_max,
            out: self.out,
            format: self.format,
        };
        RunConfig::resolve(file.overlay(flags))
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<manhattan_cox::Error> for Failure {
    fn from(e: manhattan_cox::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("cannot write output: {e}"))
    }
}

fn grid(config: &RunConfig, quad: &QuadSpec) -> Result<Vec<f64>, Failure> {
    let params = config.params();
    Ok(match config.r_max {
        Some(top) => {
            let n = config.grid_points;
            (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect()
        }
        None => montecarlo::default_grid(config.mode.palm(), &params, quad, config.grid_points)?,
    })
}

fn validate(config: RunConfig) -> Result<bool, Failure> {
    let quad = QuadSpec::default();
    let params = config.params();
    let palm = config.mode.palm();
    let grid = grid(&config, &quad)?;
    let analytic = montecarlo::analytic_curve(palm, &params, &grid, &quad)?;
    let empirical = montecarlo::estimate_cdf(&params, palm, config.trials, &grid, config.seed)?;
    let report = montecarlo::ks_compare(&empirical, &analytic)?.with_context(&config.regime, palm, config.seed);
    eprintln!(
        "{} {} (lambda_l {}, lambda_c {}): KS {:.5}, tolerance {:.5}: {}",
        config.regime,
        config.mode,
        config.lambda_l,
        config.lambda_c,
        report.ks_statistic,
        report.tolerance,
        if report.pass { "pass" } else { "FAIL" }
    );
    let v = montecarlo::Validation {
        report,
        empirical,
        analytic,
    };
    output::write_validation(&config, &v)?;
    Ok(v.report.pass)
}

fn curve(config: RunConfig) -> Result<bool, Failure> {
    let quad = QuadSpec::default();
    let params = config.params();
    let grid = grid(&config, &quad)?;
    let main = montecarlo::analytic_curve(config.mode.palm(), &params, &grid, &quad)?;
    let (rows, max_diff) = match config.mode {
        Mode::Intersection => {
            let rows = main
                .iter()
                .map(|(r, f)| CurveRow {
                    distance_km: r,
                    cdf: f,
                    cdf_assembled: None,
                    abs_diff: None,
                })
                .collect();
            (rows, None)
        }
        Mode::TypicalPoint => {
            let mut rows = Vec::with_capacity(grid.len());
            let mut worst = 0.0f64;
            for (r, f) in main.iter() {
                let g = cdf_typical_assembled(r, &params, &quad)?;
                worst = worst.max((f - g).abs());
                rows.push(CurveRow {
                    distance_km: r,
                    cdf: f,
                    cdf_assembled: Some(g),
                    abs_diff: Some((f - g).abs()),
                });
            }
            (rows, Some(worst))
        }
    };
    output::write_curve(&config, &rows, max_diff)?;
    match max_diff {
        Some(d) if d > ROUTE_TOLERANCE => {
            eprintln!("routes differ by {d:e}, above {ROUTE_TOLERANCE:e}");
            Ok(false)
        }
        _ => Ok(true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(args) => args.resolve().map_err(Failure::from).and_then(validate),
        Command::Curve(args) => args.resolve().map_err(Failure::from).and_then(curve),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
