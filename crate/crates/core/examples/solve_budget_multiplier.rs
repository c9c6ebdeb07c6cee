//! Pace expected spend to the budget by solving for the multiplier λ.
//!
//! cargo run --release --example solve_budget_multiplier

use afl_market::strategy::{expected_spend, solve_lambda};
use afl_market::win_model::{WinForm, WinningFunctionModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<f64> = (0..500).map(|_| rng.random_range(0.0..2.5)).collect();
    let requests = 100;
    for form in [WinForm::Simple, WinForm::Complex] {
        let model = WinningFunctionModel::new(form, 1.0);
        println!("{form:?}: unconstrained spend per request {:.4}", expected_spend(&samples, &model, 0.0));
        for budget in [0.5, 1.5, 3.0, 50.0] {
            let sol = solve_lambda(&samples, &model, budget, requests);
            println!(
                "  budget {budget:>5}: λ = {:.4}, spend/request {:.4} (target {:.4}), {} iterations",
                sol.lambda, sol.expected_spend_per_request, sol.target, sol.iterations
            );
        }
    }
}
