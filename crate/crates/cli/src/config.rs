//! Run configuration: presets, an optional JSON file, and flags, merged in
//! that order.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use manhattan_cox::montecarlo::{DEFAULT_GRID_POINTS, MIN_TRIALS};
use manhattan_cox::{validate_params, ModelParams, Palm};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Intersection,
    TypicalPoint,
}

impl Mode {
    pub fn palm(self) -> Palm {
        match self {
            Mode::Intersection => Palm::TypicalIntersection,
            Mode::TypicalPoint => Palm::TypicalPoint,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Intersection => "intersection",
            Mode::TypicalPoint => "typical-point",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Dense/sparse lines crossed with dense/sparse points. The point density
/// of the dense regimes differs between the two reference points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub lambda_l: f64,
    pub dense_points: bool,
    pub mode: Option<Mode>,
}

impl Preset {
    pub fn lambda_c(&self, mode: Mode) -> f64 {
        match (self.dense_points, mode) {
            (false, _) => 0.5,
            (true, Mode::Intersection) => 3.0,
            (true, Mode::TypicalPoint) => 5.0,
        }
    }
}

const REGIMES: [(&str, f64, bool); 4] = [
    ("dl-dp", 10.0, true),
    ("dl-sp", 10.0, false),
    ("sl-dp", 1.0, true),
    ("sl-sp", 1.0, false),
];

/// Resolves `dl-dp` or `dl-dp-intersection` / `dl-dp-typical`.
pub fn preset(name: &str) -> Option<Preset> {
    let lower = name.to_ascii_lowercase();
    let (base, mode) = match lower
        .split_once('-')
        .and_then(|(a, rest)| rest.split_once('-').map(|(b, m)| (a, b, m)))
    {
        Some((a, b, m)) => {
            let mode = match m {
                "intersection" => Mode::Intersection,
                "typical" | "typical-point" => Mode::TypicalPoint,
                _ => return None,
            };
            (format!("{a}-{b}"), Some(mode))
        }
        None => (lower, None),
    };
    REGIMES
        .iter()
        .find(|(n, _, _)| *n == base)
        .map(|&(name, lambda_l, dense_points)| Preset {
            name,
            lambda_l,
            dense_points,
            mode,
        })
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    REGIMES.iter().map(|r| r.0)
}

/// Every field is optional so that the file and the flags can each supply
/// any subset.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partial {
    pub preset: Option<String>,
    pub mode: Option<Mode>,
    pub lambda_l: Option<f64>,
    pub lambda_c: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub grid_points: Option<usize>,
    pub r_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Partial {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("bad config file {}: {e}", path.display())))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: Partial) -> Partial {
        Partial {
            preset: over.preset.or(self.preset),
            mode: over.mode.or(self.mode),
            lambda_l: over.lambda_l.or(self.lambda_l),
            lambda_c: over.lambda_c.or(self.lambda_c),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            grid_points: over.grid_points.or(self.grid_points),
            r_max: over.r_max.or(self.r_max),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub regime: String,
    pub mode: Mode,
    pub lambda_l: f64,
    pub lambda_c: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(p: Partial) -> Result<Self, ConfigError> {
        let preset = match &p.preset {
            Some(name) => Some(preset(name).ok_or_else(|| {
                let known: Vec<_> = preset_names().collect();
                ConfigError(format!("unknown preset {name:?}, expected one of {}", known.join(", ")))
            })?),
            None => None,
        };
        let mode = match (p.mode, preset.and_then(|s| s.mode)) {
            (Some(a), Some(b)) if a != b => {
                return Err(ConfigError(format!("preset is for {b} mode but --mode is {a}")));
            }
            (m, n) => m.or(n).unwrap_or(Mode::Intersection),
        };
        let lambda_l = p
            .lambda_l
            .or(preset.map(|s| s.lambda_l))
            .ok_or_else(|| ConfigError("lambda_l is required without a preset".into()))?;
        let lambda_c = p
            .lambda_c
            .or(preset.map(|s| s.lambda_c(mode)))
            .ok_or_else(|| ConfigError("lambda_c is required without a preset".into()))?;
        validate_params(lambda_l, lambda_c).map_err(|e| ConfigError(e.to_string()))?;

        let trials = p.trials.unwrap_or(DEFAULT_TRIALS);
        if trials < MIN_TRIALS {
            return Err(ConfigError(format!(
                "trials must be at least {MIN_TRIALS}, got {trials}"
            )));
        }
        let grid_points = p.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        if grid_points < 2 {
            return Err(ConfigError("grid_points must be at least 2".into()));
        }
        if let Some(r) = p.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ConfigError(format!("r_max must be positive, got {r}")));
            }
        }
        let format = p.format.unwrap_or_else(|| match &p.out {
            Some(path) if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        });
        let regime = match preset {
            Some(s) => s.name.to_string(),
            None => "custom".to_string(),
        };
        Ok(RunConfig {
            regime,
            mode,
            lambda_l,
            lambda_c,
            trials,
            seed: p.seed.unwrap_or(DEFAULT_SEED),
            grid_points,
            r_max: p.r_max,
            out: p.out.filter(|o| o.as_os_str() != "-"),
            format,
        })
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.lambda_l, self.lambda_c).expect("checked in resolve")
    }
}
