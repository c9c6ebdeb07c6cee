//! Fit the log-linear utility estimator on won auctions of a random pool.
//!
//! cargo run --release --example fit_estimator

use afl_market::estimator::{fit, predict, true_utility, EstimatorParams, HistoryRecord};
use afl_market::market::{generate_do_pool, make_bid_request};

fn main() {
    let pool = generate_do_pool(100, (1000, 10_000), 3).unwrap();
    let history: Vec<HistoryRecord> = pool
        .iter()
        .step_by(2)
        .map(|o| HistoryRecord {
            features: make_bid_request(o, pool.len()).features,
            realized_utility: Some(true_utility(o)),
            bid: 0.5,
            won: true,
            clearing_price: 0.5,
        })
        .collect();
    let params = EstimatorParams {
        learning_rate: 0.05 / history.len() as f64,
        ..Default::default()
    };
    let fitted = fit(&history, &params).unwrap();
    println!("theta = {:.4?}", fitted.theta);
    println!("loss {:.4} -> {:.4}", fitted.initial_loss, fitted.final_loss);
    for o in pool.iter().step_by(20) {
        let s = predict(&fitted.theta, &make_bid_request(o, pool.len()).features, params.clamp_eps);
        println!(
            "owner {:>3} {:>7} n={:>5}: true {:.3}, estimated {:.3}",
            o.id,
            o.quality_tier.as_str(),
            o.num_samples,
            true_utility(o),
            s
        );
    }
}
