//! Bootstrap, calibrated market and federated evaluation for the six default
//! consumers at the three standard budgets.
//!
//! cargo run --release --example full_experiment -- [seed]

use afl_market::harness::{run_experiment, RunConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    for budget in [50.0, 150.0, 300.0] {
        let config = RunConfig { budget, ..RunConfig::with_seed(seed) };
        let run = run_experiment(&config).unwrap();
        println!("budget {budget} (scaled {}), seed {seed}", budget * config.budget_scale);
        for m in &run.metrics.agents {
            println!(
                "  {:<6} #Total {:>6}  u.p. {:>8}  spend {:.3}  acc {:.4}",
                m.strategy,
                m.total_samples,
                m.unit_price_per_1000.map_or("-".into(), |v| format!("{v:.4}")),
                m.spend,
                m.fl_accuracy.unwrap_or(f64::NAN)
            );
        }
        for a in run.calibration.agents.iter().filter(|a| a.c_hat.is_some()) {
            println!(
                "  {} fitted c = {:.4}, λ = {:.4}",
                a.strategy,
                a.c_hat.unwrap(),
                a.lambda.map_or(0.0, |l| l.lambda)
            );
        }
    }
}
