//! CSV and JSON writers. Floats are printed in their shortest round-trip
//! form, so parsing the output recovers the computed values exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use manhattan_cox::montecarlo::{Validation, ValidationReport};
use serde::Serialize;

use crate::config::{Format, Mode, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidateRow {
    pub distance_km: f64,
    pub cdf_empirical: f64,
    pub cdf_analytic: f64,
    pub dkw_lo: f64,
    pub dkw_hi: f64,
}

pub fn validate_rows(v: &Validation) -> Vec<ValidateRow> {
    let eps = v.empirical.dkw_halfwidth().unwrap_or(0.0);
    v.empirical
        .iter()
        .zip(v.analytic.values())
        .map(|((r, e), &a)| ValidateRow {
            distance_km: r,
            cdf_empirical: e,
            cdf_analytic: a,
            dkw_lo: (e - eps).max(0.0),
            dkw_hi: (e + eps).min(1.0),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub distance_km: f64,
    pub cdf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdf_assembled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_diff: Option<f64>,
}

#[derive(Serialize)]
struct ValidateDoc<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    report: &'a ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<&'a [ValidateRow]>,
}

#[derive(Serialize)]
struct CurveMeta {
    regime: String,
    mode: Mode,
    lambda_l: f64,
    lambda_c: f64,
    grid_points: usize,
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    schema_version: u32,
    command: &'static str,
    config: CurveMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_diff: Option<f64>,
    rows: &'a [CurveRow],
}

fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: Option<&Path>, doc: &T) -> io::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    w.flush()
}

fn write_csv<T: Serialize>(out: Option<&Path>, rows: &[T]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// Where the report goes when the rows are written as CSV.
pub fn report_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".report.json");
    out.with_file_name(name)
}

/// Writes the curves in the configured format. CSV output to a file gets a
/// JSON report next to it.
pub fn write_validation(config: &RunConfig, v: &Validation) -> io::Result<()> {
    let rows = validate_rows(v);
    let out = config.out.as_deref();
    match config.format {
        Format::Json => write_json(
            out,
            &ValidateDoc {
                schema_version: SCHEMA_VERSION,
                command: "validate",
                config,
                report: &v.report,
                rows: Some(&rows),
            },
        ),
        Format::Csv => {
            write_csv(out, &rows)?;
            match out {
                Some(path) => write_json(
                    Some(&report_path(path)),
                    &ValidateDoc {
                        schema_version: SCHEMA_VERSION,
                        command: "validate",
                        config,
                        report: &v.report,
                        rows: None,
                    },
                ),
                None => Ok(()),
            }
        }
    }
}

pub fn write_curve(config: &RunConfig, rows: &[CurveRow], max_abs_diff: Option<f64>) -> io::Result<()> {
    let out = config.out.as_deref();
    match config.format {
        Format::Json => write_json(
            out,
            &CurveDoc {
                schema_version: SCHEMA_VERSION,
                command: "curve",
                config: CurveMeta {
                    regime: config.regime.clone(),
                    mode: config.mode,
                    lambda_l: config.lambda_l,
                    lambda_c: config.lambda_c,
                    grid_points: rows.len(),
                },
                max_abs_diff,
                rows,
            },
        ),
        Format::Csv => write_csv(out, rows),
    }
}
