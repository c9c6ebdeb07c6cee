//! Closed-form budget-constrained bids next to the brute-force optimum.
//!
//! cargo run --release --example closed_form_bids

use afl_market::strategy::{check_foc, optimal_bid, oracle_optimal_bid};
use afl_market::win_model::{WinForm, WinningFunctionModel};

fn main() {
    println!("{:>8} {:>6} {:>6} {:>12} {:>12} {:>10}", "form", "s", "λ", "closed", "oracle", "foc");
    for form in [WinForm::Simple, WinForm::Complex] {
        let model = WinningFunctionModel::new(form, 1.0);
        for (s, lambda) in [(0.5, 0.0), (2.0, 0.0), (2.0, 1.0), (5.0, 3.0)] {
            let b = optimal_bid(s, &model, lambda);
            let oracle = oracle_optimal_bid(s, &model, lambda);
            let foc = check_foc(s, b, &model, lambda);
            println!("{:>8} {s:>6} {lambda:>6} {b:>12.8} {oracle:>12.8} {foc:>10.1e}", format!("{form:?}"));
        }
    }
}
