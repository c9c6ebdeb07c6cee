use serde::{Deserialize, Serialize};

use super::bids::optimal_bid;
use crate::win_model::WinningFunctionModel;

pub const LAMBDA_REL_TOL: f64 = 0.01;
pub const LAMBDA_MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSolution {
    pub lambda: f64,
    pub expected_spend_per_request: f64,
    /// Per-request spend target `B / N`.
    pub target: f64,
    pub iterations: usize,
    /// Set when every utility sample is zero and the solve is vacuous.
    pub degenerate: bool,
}

/// Mean of `b(s) W(b(s))` over `utility_samples` at multiplier `lambda`.
pub fn expected_spend(utility_samples: &[f64], model: &WinningFunctionModel, lambda: f64) -> f64 {
    let total: f64 = utility_samples
        .iter()
        .map(|&s| {
            let b = optimal_bid(s.max(0.0), model, lambda);
            b * model.win_prob(b)
        })
        .sum();
    total / utility_samples.len() as f64
}

/// Finds the budget multiplier that paces expected spend to `budget / num_requests`.
///
/// Returns `lambda = 0` when the budget does not bind. Otherwise the upper
/// bracket is doubled from 1 until spend falls below target, then bisected.
pub fn solve_lambda(
    utility_samples: &[f64],
    model: &WinningFunctionModel,
    budget: f64,
    num_requests: usize,
) -> LambdaSolution {
    assert!(!utility_samples.is_empty(), "need at least one utility sample");
    assert!(budget > 0.0, "budget must be positive, got {budget}");
    assert!(num_requests >= 1, "need at least one request");
    let target = budget / num_requests as f64;
    let spend_at_zero = expected_spend(utility_samples, model, 0.0);
    let degenerate = utility_samples.iter().all(|&s| s <= 0.0);
    if degenerate || spend_at_zero <= target {
        return LambdaSolution {
            lambda: 0.0,
            expected_spend_per_request: spend_at_zero,
            target,
            iterations: 0,
            degenerate,
        };
    }

    let mut iterations = 0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut spend_hi = expected_spend(utility_samples, model, hi);
    while spend_hi >= target && iterations < LAMBDA_MAX_ITERATIONS {
        lo = hi;
        hi *= 2.0;
        spend_hi = expected_spend(utility_samples, model, hi);
        iterations += 1;
    }

    let mut best = (hi, spend_hi);
    while iterations < LAMBDA_MAX_ITERATIONS {
        if (best.1 - target).abs() <= LAMBDA_REL_TOL * target {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let spend = expected_spend(utility_samples, model, mid);
        iterations += 1;
        if (spend - target).abs() < (best.1 - target).abs() {
            best = (mid, spend);
        }
        if spend > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    LambdaSolution {
        lambda: best.0,
        expected_spend_per_request: best.1,
        target,
        iterations,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::win_model::WinForm;

    #[test]
    fn slack_budget_gives_zero() {
        let m = WinningFunctionModel::new(WinForm::Simple, 1.0);
        let samples = [0.5, 1.0, 1.5];
        let sol = solve_lambda(&samples, &m, 1e6, 100);
        assert_eq!(sol.lambda, 0.0);
        assert!(sol.expected_spend_per_request <= sol.target);
    }

    #[test]
    fn all_zero_samples_flagged() {
        let m = WinningFunctionModel::new(WinForm::Complex, 1.0);
        let sol = solve_lambda(&[0.0, 0.0], &m, 1.0, 10);
        assert_eq!(sol.lambda, 0.0);
        assert!(sol.degenerate);
    }

    #[test]
    fn binding_budget_hits_target() {
        for form in [WinForm::Simple, WinForm::Complex] {
            let m = WinningFunctionModel::new(form, 0.8);
            let samples: Vec<f64> = (1..=50).map(|i| i as f64 * 0.05).collect();
            let sol = solve_lambda(&samples, &m, 0.5, 100);
            assert!(sol.lambda > 0.0);
            assert!((sol.expected_spend_per_request - sol.target).abs() <= 0.01 * sol.target);
        }
    }
}
