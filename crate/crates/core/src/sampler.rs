//! Seeded sampling of the Manhattan line process and the Cox process it
//! drives, restricted to a square window.
//!
//! A homogeneous 1D Poisson process on `[-W, W]` is drawn by first drawing a
//! Poisson count with mean `2 W lambda` and then placing that many i.i.d.
//! uniform points, which is exactly the conditional law of a Poisson process
//! given its count.
//!
//! Every public sampler takes a `u64` seed. Trials that use seeds `s, s+1, ...`
//! draw from independent ChaCha streams, see [`stream_rng`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Line, ModelParams, Orientation, Window};

/// The reference point the process is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Palm {
    /// A crossing of a horizontal and a vertical line sits at the origin.
    TypicalIntersection,
    /// A point of the Cox process sits at the origin on a horizontal line.
    TypicalPoint,
}

/// Deterministic generator for `(seed, stream)`.
///
/// ChaCha keys derived from different seeds are unrelated, and distinct
/// stream ids under one key never overlap, so both can be used to split work.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A realization of the Manhattan line process inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSet {
    vertical: Vec<f64>,
    horizontal: Vec<f64>,
    window: Window,
    palm: Option<Palm>,
    palm_vertical: Option<usize>,
    palm_horizontal: Option<usize>,
}

impl LineSet {
    /// Builds a line set from explicit offsets. Offsets are sorted and must
    /// lie inside the window.
    pub fn from_offsets(window: Window, mut vertical: Vec<f64>, mut horizontal: Vec<f64>) -> Result<Self> {
        for &o in vertical.iter().chain(horizontal.iter()) {
            if !o.is_finite() || !window.contains(o) {
                return Err(Error::InvalidArgument(format!(
                    "line offset {o} lies outside the window of half-width {}",
                    window.half_width()
                )));
            }
        }
        vertical.sort_by(f64::total_cmp);
        horizontal.sort_by(f64::total_cmp);
        Ok(LineSet {
            vertical,
            horizontal,
            window,
            palm: None,
            palm_vertical: None,
            palm_horizontal: None,
        })
    }

    /// Sorted x-intercepts of the vertical lines.
    pub fn vertical_offsets(&self) -> &[f64] {
        &self.vertical
    }

    /// Sorted y-intercepts of the horizontal lines.
    pub fn horizontal_offsets(&self) -> &[f64] {
        &self.horizontal
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn palm(&self) -> Option<Palm> {
        self.palm
    }

    /// Index of the added vertical line `L_y` through the origin.
    pub fn palm_vertical_index(&self) -> Option<usize> {
        self.palm_vertical
    }

    /// Index of the added horizontal line `L_x` through the origin.
    pub fn palm_horizontal_index(&self) -> Option<usize> {
        self.palm_horizontal
    }

    pub fn len(&self) -> usize {
        self.vertical.len() + self.horizontal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All lines, vertical first, each in offset order.
    pub fn lines(&self) -> impl Iterator<Item = Line> + '_ {
        let v = self.vertical.iter().enumerate().map(move |(i, &offset)| Line {
            orientation: Orientation::Vertical,
            offset,
            palm_added: self.palm_vertical == Some(i),
        });
        let h = self.horizontal.iter().enumerate().map(move |(i, &offset)| Line {
            orientation: Orientation::Horizontal,
            offset,
            palm_added: self.palm_horizontal == Some(i),
        });
        v.chain(h)
    }
}

/// Cox points along every line of a [`LineSet`], indexed like the line
/// set's sorted offset lists.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxSample {
    vertical: Vec<Vec<f64>>,
    horizontal: Vec<Vec<f64>>,
    has_atom_at_origin: bool,
}

impl CoxSample {
    /// Builds a sample from explicit per-line coordinates (y for vertical
    /// lines, x for horizontal ones).
    pub fn from_coordinates(
        lines: &LineSet,
        mut vertical: Vec<Vec<f64>>,
        mut horizontal: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if vertical.len() != lines.vertical.len() || horizontal.len() != lines.horizontal.len() {
            return Err(Error::InvalidArgument("one coordinate list is needed per line".into()));
        }
        let window = lines.window;
        for pts in vertical.iter_mut().chain(horizontal.iter_mut()) {
            if pts.iter().any(|&p| !p.is_finite() || !window.contains(p)) {
                return Err(Error::InvalidArgument("Cox point lies outside the window".into()));
            }
            pts.sort_by(f64::total_cmp);
        }
        Ok(CoxSample {
            vertical,
            horizontal,
            has_atom_at_origin: lines.palm == Some(Palm::TypicalPoint),
        })
    }

    /// Sorted y-coordinates of the points on vertical line `i`.
    pub fn on_vertical(&self, i: usize) -> &[f64] {
        &self.vertical[i]
    }

    /// Sorted x-coordinates of the points on horizontal line `i`.
    pub fn on_horizontal(&self, i: usize) -> &[f64] {
        &self.horizontal[i]
    }

    /// True in the typical-point case. The atom is the reference point
    /// itself and is never stored in the per-line lists.
    pub fn has_atom_at_origin(&self) -> bool {
        self.has_atom_at_origin
    }

    /// Number of points, not counting the atom.
    pub fn len(&self) -> usize {
        self.vertical.iter().chain(self.horizontal.iter()).map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points as `(x, y)`, not counting the atom.
    pub fn points<'a>(&'a self, lines: &'a LineSet) -> impl Iterator<Item = (f64, f64)> + 'a {
        let v = lines
            .vertical
            .iter()
            .zip(&self.vertical)
            .flat_map(|(&x, ys)| ys.iter().map(move |&y| (x, y)));
        let h = lines
            .horizontal
            .iter()
            .zip(&self.horizontal)
            .flat_map(|(&y, xs)| xs.iter().map(move |&x| (x, y)));
        v.chain(h)
    }
}

/// Sorted points of a homogeneous Poisson process on `[-w, w]`.
pub(crate) fn poisson_segment<R: Rng + ?Sized>(rng: &mut R, intensity: f64, w: f64) -> Vec<f64> {
    let mean = intensity * 2.0 * w;
    // Poisson::new rejects non-positive means; such a segment is empty.
    let n = match Poisson::new(mean) {
        Ok(d) => d.sample(rng) as usize,
        Err(_) => 0,
    };
    let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(-w..=w)).collect();
    pts.sort_by(f64::total_cmp);
    pts
}

pub fn sample_mplp_with<R: Rng + ?Sized>(rng: &mut R, params: &ModelParams, window: Window) -> LineSet {
    let w = window.half_width();
    let vertical = poisson_segment(rng, params.lambda_l(), w);
    let horizontal = poisson_segment(rng, params.lambda_l(), w);
    LineSet {
        vertical,
        horizontal,
        window,
        palm: None,
        palm_vertical: None,
        palm_horizontal: None,
    }
}

/// Draws the line process inside `window`.
pub fn sample_mplp(params: &ModelParams, window: Window, seed: u64) -> LineSet {
    sample_mplp_with(&mut stream_rng(seed, 0), params, window)
}

fn insert_sorted(offsets: &mut Vec<f64>, value: f64) -> usize {
    let at = offsets.partition_point(|&o| o < value);
    offsets.insert(at, value);
    at
}

/// Adds the lines through the origin implied by conditioning on the
/// reference point.
///
/// Conditioning a Poisson process on having a point at the origin is the
/// same as adding one there, so the typical intersection gets both axis
/// lines and the typical point only the horizontal axis line.
pub fn palm_condition(mut lines: LineSet, mode: Palm) -> Result<LineSet> {
    if lines.palm.is_some() {
        return Err(Error::AlreadyConditioned);
    }
    let h = insert_sorted(&mut lines.horizontal, 0.0);
    lines.palm_horizontal = Some(h);
    if mode == Palm::TypicalIntersection {
        let v = insert_sorted(&mut lines.vertical, 0.0);
        lines.palm_vertical = Some(v);
    }
    lines.palm = Some(mode);
    Ok(lines)
}

pub fn sample_cox_with<R: Rng + ?Sized>(rng: &mut R, lines: &LineSet, params: &ModelParams) -> CoxSample {
    let w = lines.window.half_width();
    let c = params.lambda_c();
    let vertical = lines.vertical.iter().map(|_| poisson_segment(rng, c, w)).collect();
    let horizontal = lines.horizontal.iter().map(|_| poisson_segment(rng, c, w)).collect();
    CoxSample {
        vertical,
        horizontal,
        has_atom_at_origin: lines.palm == Some(Palm::TypicalPoint),
    }
}

/// Populates every line with an independent Poisson process of density
/// `lambda_c`.
pub fn sample_cox(lines: &LineSet, params: &ModelParams, seed: u64) -> CoxSample {
    sample_cox_with(&mut stream_rng(seed, 1), lines, params)
}

/// Monte-Carlo estimate of the mean line length per unit area: total chord
/// length inside the disc of radius `W` divided by its area, averaged over
/// `n_trials` independent line sets.
pub fn empirical_line_density(params: &ModelParams, window: Window, n_trials: usize, seed: u64) -> Result<f64> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
    }
    let w = window.half_width();
    let area = std::f64::consts::PI * w * w;
    let chord = |o: f64| 2.0 * (w * w - o * o).max(0.0).sqrt();
    let mut total = 0.0;
    for i in 0..n_trials {
        let lines = sample_mplp(params, window, seed.wrapping_add(i as u64));
        let len: f64 = lines.vertical.iter().chain(&lines.horizontal).map(|&o| chord(o)).sum();
        total += len / area;
    }
    Ok(total / n_trials as f64)
}
