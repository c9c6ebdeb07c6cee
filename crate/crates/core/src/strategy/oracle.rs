//! Brute-force reference for the pointwise optimal bid. Slow by design of
//! its role: it certifies the closed forms and never runs inside a market.

use crate::win_model::WinningFunctionModel;

pub const ORACLE_GRID_POINTS: usize = 1_000_000;
pub const ORACLE_BISECTION_STEPS: usize = 50;

/// Expected surplus minus multiplier-weighted expected spend of bidding `b`
/// on an item worth `s`: `(s - b) W(b) - lambda b W(b)`.
pub fn bid_objective(s: f64, b: f64, model: &WinningFunctionModel, lambda: f64) -> f64 {
    (s - b) * model.win_prob(b) - lambda * b * model.win_prob(b)
}

fn objective_slope(s: f64, b: f64, model: &WinningFunctionModel, lambda: f64) -> f64 {
    let w = model.win_prob(b);
    let dw = model.derivative(b);
    -w + (s - b) * dw - lambda * (w + b * dw)
}

/// Maximizes [`bid_objective`] over `[0, s]` by a uniform grid of
/// [`ORACLE_GRID_POINTS`] points, then bisects the slope inside the
/// neighbouring grid cells.
pub fn oracle_optimal_bid(s: f64, model: &WinningFunctionModel, lambda: f64) -> f64 {
    assert!(s >= 0.0, "utility must be non-negative, got {s}");
    if s == 0.0 {
        return 0.0;
    }
    let n = ORACLE_GRID_POINTS;
    let step = s / (n - 1) as f64;
    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..n {
        let f = bid_objective(s, i as f64 * step, model, lambda);
        if f > best_f {
            best_f = f;
            best_i = i;
        }
    }
    let mut lo = best_i.saturating_sub(1) as f64 * step;
    let mut hi = ((best_i + 1).min(n - 1)) as f64 * step;
    let grid_best = best_i as f64 * step;
    if !(objective_slope(s, lo, model, lambda) > 0.0 && objective_slope(s, hi, model, lambda) < 0.0) {
        return grid_best;
    }
    for _ in 0..ORACLE_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if objective_slope(s, mid, model, lambda) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
