//! Globally adaptive 15-point Gauss-Kronrod quadrature.
//!
//! The integrands of the typical-point distribution are smooth only between
//! known kinks, so callers pass those kinks as breakpoints instead of
//! relying on bisection to find them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances for every quadrature in this crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper limit used in place of infinity. `None` derives it from the
    /// integrand's decay rate, see [`QuadSpec::tail_cut_for`].
    pub tail_cut: Option<f64>,
    /// Bisections allowed per one-dimensional integral.
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            tail_cut: None,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive".into()));
        }
        Ok(QuadSpec {
            abs_tol,
            rel_tol,
            ..Default::default()
        })
    }

    /// Truncation point for an integrand bounded by `scale * exp(-rate x)`:
    /// the neglected tail stays below a tenth of `abs_tol`.
    pub fn tail_cut_for(&self, start: f64, rate: f64, scale: f64) -> f64 {
        self.tail_cut
            .unwrap_or_else(|| start + (10.0 * scale / (rate * self.abs_tol)).max(1.0).ln() / rate)
    }

    fn scaled(&self, abs_tol: f64) -> QuadSpec {
        QuadSpec { abs_tol, ..*self }
    }
}

// Published 15-point Kronrod nodes and weights, at full printed precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    let mut res_abs = kron.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx)?, f(center + dx)?);
        *slot = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, &(f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kron * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(Error::QuadratureFailure { estimate: value, error });
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates a fallible integrand over `[a, b]`, stopping at the first
/// integrand error.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, quad: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!("bad integration limits [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let first = kronrod(&mut f, a, b)?;
    let (mut value, mut error) = (first.value, first.error);
    let mut heap = BinaryHeap::from([first]);
    let mut frozen_error = 0.0;

    for _ in 0..quad.max_subdivisions {
        if error + frozen_error <= quad.abs_tol.max(quad.rel_tol * value.abs()) {
            return Ok(value);
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Panels at the resolution of f64 cannot be split further; their
        // error stays in the budget.
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e3 * f64::EPSILON * mid.abs().max(1.0) {
            frozen_error += worst.error;
            error -= worst.error;
            continue;
        }
        let left = kronrod(&mut f, worst.a, mid)?;
        let right = kronrod(&mut f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Recompute from the panels to shed accumulated rounding in the sums.
    let value: f64 = heap.iter().map(|p| p.value).sum::<f64>();
    let error: f64 = heap.iter().map(|p| p.error).sum::<f64>() + frozen_error;
    if error <= quad.abs_tol.max(quad.rel_tol * value.abs()) {
        Ok(value)
    } else {
        Err(Error::QuadratureFailure { estimate: value, error })
    }
}

/// Integrates `f` over `[a, b]` to the tolerance in `quad`.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, quad: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), a, b, quad)
}

/// Integrates over `[a, b]` split at every breakpoint strictly inside it.
/// The absolute tolerance is shared evenly between the pieces.
pub fn try_integrate_pieces<F>(mut f: F, a: f64, b: f64, breaks: &[f64], quad: &QuadSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut knots = Vec::with_capacity(cuts.len() + 2);
    knots.push(a);
    knots.extend(cuts);
    knots.push(b);
    let piece_quad = quad.scaled(quad.abs_tol / (knots.len() - 1) as f64);
    knots
        .windows(2)
        .map(|w| try_integrate(&mut f, w[0], w[1], &piece_quad))
        .sum()
}

/// Iterated integral `int_a^b int_{lo(x)}^{hi(x)} f(x, y) dy dx`.
///
/// `outer_breaks` are kinks in `x`; `inner(x)` returns the inner limits and
/// the kinks in `y` for that `x`.
pub fn integrate_2d<F, L>(f: F, a: f64, b: f64, outer_breaks: &[f64], inner: L, quad: &QuadSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
    L: Fn(f64) -> (f64, f64, Vec<f64>),
{
    // Inner errors add up over the outer range.
    let inner_quad = quad.scaled(0.1 * quad.abs_tol / (b - a).max(1.0));
    try_integrate_pieces(
        |x| {
            let (lo, hi, breaks) = inner(x);
            if hi <= lo {
                return Ok(0.0);
            }
            try_integrate_pieces(|y| f(x, y), lo, hi, &breaks, &inner_quad)
        },
        a,
        b,
        outer_breaks,
        quad,
    )
}
