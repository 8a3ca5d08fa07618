//! Path distance from the typical point of the Cox process.
//!
//! Conditioning variables: `x1 <= x2` are the distances from the origin to
//! the nearest vertical line on the near and far side, and `D1`, `D2` the
//! distances to the nearest Cox point on the axis line in those directions.
//! The four events compare `D_j` with `x_j`:
//!
//! | event | `D1` vs `x1` | `D2` vs `x2` |
//! |-------|--------------|--------------|
//! | E1    | `<=`         | `>`          |
//! | E2    | `<=`         | `<=`         |
//! | E3    | `>`          | `>`          |
//! | E4    | `>`          | `<=`         |
//!
//! Under E3 (and for the right-hand leg of E4) the remaining distance is
//! measured from the crossing at `x1` (`W1`) or at `-x2` (`W2`); their
//! CDFs change form where the void region around the crossing reaches the
//! vertical line that splits the plane between the two starting directions.

use serde::Serialize;

use super::clamp_probability;
use super::quad::{integrate_2d, try_integrate_pieces, QuadSpec};
use crate::error::{Error, Result};
use crate::geom::ModelParams;

/// The pair `(x1, x2)` with `0 <= x1 <= x2 < inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningState {
    x1: f64,
    x2: f64,
}

impl ConditioningState {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if x1 >= 0.0 && x1 <= x2 && x2.is_finite() {
            Ok(ConditioningState { x1, x2 })
        } else {
            Err(Error::InvalidState { x1, x2 })
        }
    }

    /// Orders two one-sided distances into a state.
    pub fn from_sides(s_r: f64, s_l: f64) -> Result<Self> {
        Self::new(s_r.min(s_l), s_r.max(s_l))
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventId {
    E1,
    E2,
    E3,
    E4,
}

impl EventId {
    pub const ALL: [EventId; 4] = [EventId::E1, EventId::E2, EventId::E3, EventId::E4];
}

/// Density of the distance to the nearest vertical line on one side.
pub fn pdf_s(s: f64, params: &ModelParams) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::NegativeDistance(s));
    }
    let l = params.lambda_l();
    Ok(l * (-l * s).exp())
}

/// Marginal density of the nearer crossing distance `X1`.
pub fn pdf_x1(x1: f64, params: &ModelParams) -> Result<f64> {
    if x1.is_nan() || x1 < 0.0 {
        return Err(Error::NegativeDistance(x1));
    }
    let l = params.lambda_l();
    Ok(2.0 * l * (-2.0 * l * x1).exp())
}

/// Marginal density of the farther crossing distance `X2`.
pub fn pdf_x2(x2: f64, params: &ModelParams) -> Result<f64> {
    if x2.is_nan() || x2 < 0.0 {
        return Err(Error::NegativeDistance(x2));
    }
    let l = params.lambda_l();
    Ok(-2.0 * l * (-l * x2).exp() * (-l * x2).exp_m1())
}

/// Joint density of `(X1, X2)` on `0 <= x1 <= x2`.
pub fn pdf_x1x2(state: &ConditioningState, params: &ModelParams) -> f64 {
    let l = params.lambda_l();
    2.0 * l * l * (-l * (state.x1 + state.x2)).exp()
}

/// `P(E | X1 = x1, X2 = x2)`.
pub fn prob_event(event: EventId, state: &ConditioningState, params: &ModelParams) -> f64 {
    let c = params.lambda_c();
    // hit_j = P(D_j <= x_j), miss_j = P(D_j > x_j)
    let hit1 = -(-c * state.x1).exp_m1();
    let hit2 = -(-c * state.x2).exp_m1();
    let miss1 = (-c * state.x1).exp();
    let miss2 = (-c * state.x2).exp();
    match event {
        EventId::E1 => hit1 * miss2,
        EventId::E2 => hit1 * hit2,
        EventId::E3 => (-c * (state.x1 + state.x2)).exp(),
        EventId::E4 => miss1 * hit2,
    }
}

/// Log-survival of `W` on its first branch: the void region around the
/// crossing is a full L1 ball of radius `w`.
fn log_survival_w_branch1(w: f64, params: &ModelParams) -> f64 {
    let (l, c) = (params.lambda_l(), params.lambda_c());
    -3.0 * c * w - 3.0 * l * w - (3.0 * l / (2.0 * c)) * (-2.0 * c * w).exp_m1()
}

/// Log-survival of `W` on its second branch, where the ball is cut by the
/// splitting line at distance `other` behind the crossing.
fn log_survival_w_branch2(w: f64, other: f64, params: &ModelParams) -> f64 {
    let (l, c) = (params.lambda_l(), params.lambda_c());
    // 3 + 2e^{-2c o} - e^{-2c w} - 4e^{-c(o+w)}, regrouped so the constant
    // terms cancel exactly.
    let bracket = 2.0 * (-2.0 * c * other).exp_m1() - (-2.0 * c * w).exp_m1() - 4.0 * (-c * (other + w)).exp_m1();
    -3.0 * (c + l) * w + (l / (2.0 * c)) * bracket
}

fn check_branch(w: f64, lo: f64, hi: f64, open_lo: bool) -> Result<()> {
    let below = if open_lo { w <= lo } else { w < lo };
    if w.is_nan() || below || w > hi {
        Err(Error::BranchDomain { w, lo, hi })
    } else {
        Ok(())
    }
}

/// First branch of the conditional CDF of `W1`, valid for `0 <= w <= x2`.
pub fn cdf_w1_branch1(w: f64, state: &ConditioningState, params: &ModelParams) -> Result<f64> {
    check_branch(w, 0.0, state.x2, false)?;
    Ok(-log_survival_w_branch1(w, params).exp_m1())
}

/// Second branch of the conditional CDF of `W1`, valid for `w > x2`.
pub fn cdf_w1_branch2(w: f64, state: &ConditioningState, params: &ModelParams) -> Result<f64> {
    check_branch(w, state.x2, f64::INFINITY, true)?;
    Ok(-log_survival_w_branch2(w, state.x2, params).exp_m1())
}

/// First branch of the conditional CDF of `W2`, valid for `0 <= w <= x1`.
pub fn cdf_w2_branch1(w: f64, state: &ConditioningState, params: &ModelParams) -> Result<f64> {
    check_branch(w, 0.0, state.x1, false)?;
    Ok(-log_survival_w_branch1(w, params).exp_m1())
}

/// Second branch of the conditional CDF of `W2`, valid for `w > x1`.
pub fn cdf_w2_branch2(w: f64, state: &ConditioningState, params: &ModelParams) -> Result<f64> {
    check_branch(w, state.x1, f64::INFINITY, true)?;
    Ok(-log_survival_w_branch2(w, state.x1, params).exp_m1())
}

/// Conditional CDF of `W1` given E3 and the state; zero for `w <= 0`.
///
/// The remaining distance `Z1` of event E4 has the same law.
pub fn cdf_w1(w: f64, state: &ConditioningState, params: &ModelParams) -> f64 {
    if w <= 0.0 {
        0.0
    } else if w <= state.x2 {
        -log_survival_w_branch1(w, params).exp_m1()
    } else {
        -log_survival_w_branch2(w, state.x2, params).exp_m1()
    }
}

/// Conditional CDF of `W2` given E3 and the state; zero for `w <= 0`.
pub fn cdf_w2(w: f64, state: &ConditioningState, params: &ModelParams) -> f64 {
    if w <= 0.0 {
        0.0
    } else if w <= state.x1 {
        -log_survival_w_branch1(w, params).exp_m1()
    } else {
        -log_survival_w_branch2(w, state.x1, params).exp_m1()
    }
}

/// `P(R <= rm | E, X1 = x1, X2 = x2)`, piece by piece as derived for each
/// event.
pub fn cond_cdf_rm(event: EventId, rm: f64, state: &ConditioningState, params: &ModelParams) -> f64 {
    if rm <= 0.0 {
        return 0.0;
    }
    let c = params.lambda_c();
    let (x1, x2) = (state.x1, state.x2);
    match event {
        EventId::E1 => {
            if rm <= x1 {
                (-c * rm).exp_m1() / (-c * x1).exp_m1()
            } else {
                1.0
            }
        }
        EventId::E2 => {
            if rm < x1 {
                let num = -(-2.0 * c * rm).exp_m1() + (-c * rm).exp_m1() * ((-c * x1).exp() + (-c * x2).exp());
                num / ((-c * x1).exp_m1() * (-c * x2).exp_m1())
            } else {
                1.0
            }
        }
        EventId::E3 => {
            let f1 = |w| -log_survival_w_branch1(w, params).exp_m1();
            let f2 = |w, other| -log_survival_w_branch2(w, other, params).exp_m1();
            if rm < x1 {
                0.0
            } else if rm < x2 {
                f1(rm - x1)
            } else if rm < x1 + x2 {
                let (a, b) = (f1(rm - x1), f1(rm - x2));
                a + b - a * b
            } else {
                let (a, b) = (f2(rm - x1, x2), f2(rm - x2, x1));
                a + b - a * b
            }
        }
        EventId::E4 => {
            if rm <= x1 {
                (-c * rm).exp_m1() / (-c * x2).exp_m1()
            } else if rm < x2 {
                let survive = log_survival_w_branch1(rm - x1, params).exp();
                1.0 - survive * ((-c * rm).exp() - (-c * x2).exp()) / -(-c * x2).exp_m1()
            } else {
                1.0
            }
        }
    }
}

/// `P(R <= rm | X1 = x1, X2 = x2)` by total probability over the events.
pub fn conditional_cdf_rm(rm: f64, state: &ConditioningState, params: &ModelParams) -> f64 {
    EventId::ALL
        .iter()
        .map(|&e| {
            let p = prob_event(e, state, params);
            if p == 0.0 {
                0.0
            } else {
                p * cond_cdf_rm(e, rm, state, params)
            }
        })
        .sum()
}

fn check_rm(rm: f64) -> Result<()> {
    if rm.is_nan() || rm < 0.0 {
        Err(Error::NegativeDistance(rm))
    } else {
        Ok(())
    }
}

/// CDF of the shortest path distance from the typical point to its nearest
/// neighbour, from the closed single and double integrals over the
/// branch CDFs of `W1` and `W2`.
pub fn cdf_typical_theorem2(rm: f64, params: &ModelParams, quad: &QuadSpec) -> Result<f64> {
    check_rm(rm)?;
    if rm == 0.0 {
        return Ok(0.0);
    }
    let (l, c) = (params.lambda_l(), params.lambda_c());
    let s = l + c;
    let half = rm / 2.0;
    let surv1 = |w: f64| log_survival_w_branch1(w, params).exp();
    let surv2 = |w: f64, other: f64| log_survival_w_branch2(w, other, params).exp();

    // Near crossing inside the ball, far crossing outside it.
    let near_only = try_integrate_pieces(|x1| Ok(surv1(rm - x1) * (-s * x1).exp()), 0.0, rm, &[], quad)?;

    // Both crossings inside, x1 + x2 > rm: first branches.
    let both_first = integrate_2d(
        |x2, x1| Ok((-s * x2).exp() * surv1(rm - x2) * surv1(rm - x1) * (-s * x1).exp()),
        half,
        rm,
        &[],
        |x2| (rm - x2, x2, vec![]),
        quad,
    )?;

    // x1 + x2 <= rm: second branches, split at x2 = rm / 2.
    let second = |x2: f64, x1: f64| Ok((-s * x2).exp() * surv2(rm - x1, x2) * surv2(rm - x2, x1) * (-s * x1).exp());
    let both_second_upper = integrate_2d(second, half, rm, &[], |x2| (0.0, rm - x2, vec![]), quad)?;
    let both_second_lower = integrate_2d(second, 0.0, half, &[], |x2| (0.0, x2, vec![]), quad)?;

    let value = -(-2.0 * s * rm).exp_m1()
        - 2.0 * l * (-s * rm).exp() * near_only
        - 2.0 * l * l * (both_first + both_second_upper + both_second_lower);
    clamp_probability(value)
}

/// Same CDF computed mechanically: the event-weighted conditional CDF
/// integrated against the joint density of `(X1, X2)`. Independent of the
/// closed form in [`cdf_typical_theorem2`].
pub fn cdf_typical_assembled(rm: f64, params: &ModelParams, quad: &QuadSpec) -> Result<f64> {
    check_rm(rm)?;
    if rm == 0.0 {
        return Ok(0.0);
    }
    // Integrated over x1, the integrand is bounded by the density of X2,
    // itself below 2 lambda_l exp(-lambda_l x2).
    let l = params.lambda_l();
    let tail = quad.tail_cut_for(rm, l, 2.0 * l);
    let value = integrate_2d(
        |x2, x1| {
            let state = ConditioningState { x1, x2 };
            Ok(conditional_cdf_rm(rm, &state, params) * pdf_x1x2(&state, params))
        },
        0.0,
        tail,
        &[rm / 2.0, rm],
        |x2| (0.0, x2, vec![rm - x2, rm]),
        quad,
    )?;
    clamp_probability(value)
}
