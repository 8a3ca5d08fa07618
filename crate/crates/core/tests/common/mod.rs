//! Checks shared by the property tests and the acceptance run. Each returns
//! a description of the first violation found.
#![allow(dead_code)]

use manhattan_cox::analytic::{
    cdf_intersection, cdf_typical_theorem2, cdf_w1_branch1, cdf_w1_branch2, cdf_w2_branch1, cdf_w2_branch2,
    cond_cdf_rm, prob_event, ConditioningState, EventId, QuadSpec,
};
use manhattan_cox::ModelParams;

pub type Check = Result<(), String>;

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

pub fn cdf_is_monotone_in_unit_interval(params: &ModelParams, grid: &[f64], typical: bool) -> Check {
    let quad = QuadSpec::default();
    let mut prev = 0.0;
    for &r in grid {
        let v = if typical {
            cdf_typical_theorem2(r, params, &quad)
        } else {
            cdf_intersection(r, params)
        }
        .map_err(|e| format!("{params:?} r {r}: {e}"))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(format!("{params:?} r {r}: value {v} outside [0, 1]"));
        }
        // Quadrature noise may undo a rise smaller than its tolerance.
        if v < prev - 2.0 * quad.abs_tol {
            return Err(format!("{params:?} r {r}: {v} below previous {prev}"));
        }
        prev = v;
    }
    Ok(())
}

pub fn branches_meet(state: &ConditioningState, params: &ModelParams) -> Check {
    let (x1, x2) = (state.x1(), state.x2());
    let pairs = [
        (
            cdf_w1_branch1(x2, state, params),
            cdf_w1_branch2(next_up(x2), state, params),
        ),
        (
            cdf_w2_branch1(x1, state, params),
            cdf_w2_branch2(next_up(x1), state, params),
        ),
    ];
    for (a, b) in pairs {
        let (a, b) = (a.map_err(|e| e.to_string())?, b.map_err(|e| e.to_string())?);
        if (a - b).abs() > 1e-12 {
            return Err(format!("{params:?} {state:?}: branches {a} vs {b}"));
        }
    }
    Ok(())
}

pub fn events_partition(state: &ConditioningState, params: &ModelParams) -> Check {
    let total: f64 = EventId::ALL.iter().map(|&e| prob_event(e, state, params)).sum();
    if (total - 1.0).abs() > 1e-14 {
        return Err(format!("{params:?} {state:?}: event probabilities sum to {total}"));
    }
    Ok(())
}

pub fn conditional_cdfs_are_continuous(state: &ConditioningState, params: &ModelParams) -> Check {
    let (x1, x2) = (state.x1(), state.x2());
    for e in EventId::ALL {
        for b in [x1, x2, x1 + x2] {
            if b <= 0.0 {
                continue;
            }
            let eps = b * 1e-13;
            let (lo, hi) = (
                cond_cdf_rm(e, b - eps, state, params),
                cond_cdf_rm(e, b + eps, state, params),
            );
            if (lo - hi).abs() > 1e-10 {
                return Err(format!("{params:?} {state:?} {e:?} at {b}: {lo} vs {hi}"));
            }
        }
    }
    Ok(())
}

/// Relative error of the forward-difference slope at zero.
pub fn slope_error(params: &ModelParams, typical: bool) -> Result<f64, String> {
    let h = 1e-4;
    let (f, want) = if typical {
        (
            cdf_typical_theorem2(h, params, &QuadSpec::default()),
            2.0 * params.lambda_c(),
        )
    } else {
        (cdf_intersection(h, params), 4.0 * params.lambda_c())
    };
    let f = f.map_err(|e| e.to_string())?;
    Ok((f / h / want - 1.0).abs())
}
