//! Recover the winning-function scale from simulated win/loss records.
//!
//! cargo run --release --example calibrate_win_model

use afl_market::estimator::HistoryRecord;
use afl_market::win_model::{calibrate_c, empirical_win_curve, WinForm, WinningFunctionModel, DEFAULT_NUM_BUCKETS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (form, c_true) in [(WinForm::Simple, 2.0), (WinForm::Complex, 1.5)] {
        let truth = WinningFunctionModel::new(form, c_true);
        let records: Vec<HistoryRecord> = (0..10_000)
            .map(|_| {
                let bid = rng.random_range(0.0..4.0 * c_true);
                let won = rng.random::<f64>() < truth.win_prob(bid);
                HistoryRecord {
                    features: [1.0, 0.0, 0.0],
                    realized_utility: None,
                    bid,
                    won,
                    clearing_price: if won { bid } else { 0.0 },
                }
            })
            .collect();
        let curve = empirical_win_curve(&records, DEFAULT_NUM_BUCKETS).unwrap();
        let c = calibrate_c(&curve, form).unwrap();
        println!("{form:?}: true c = {c_true}, fitted c = {c:.4}");
        for b in curve.buckets.iter().step_by(4) {
            let fitted = WinningFunctionModel::new(form, c).win_prob(b.bid_mid);
            println!("  bid {:.3}: observed {:.3}, fitted {:.3} ({} records)", b.bid_mid, b.win_rate, fitted, b.count);
        }
    }
}
