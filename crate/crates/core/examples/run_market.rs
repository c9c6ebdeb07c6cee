//! A single first-price market with hand-configured consumers.
//!
//! cargo run --release --example run_market

use afl_market::market::{compute_metrics, generate_do_pool, run_market, ConsumerAgent, MarketConfig};
use afl_market::strategy::{StrategyKind, StrategyParams};
use afl_market::win_model::{WinForm, WinningFunctionModel};

fn main() {
    let owners = generate_do_pool(100, (1000, 10_000), 11).unwrap();
    let theta = vec![-0.5, 4.0, 2.0];
    let params = StrategyParams::default();
    let agents = vec![
        ConsumerAgent::new(0, StrategyKind::Const, 1.5).with_params(params),
        ConsumerAgent::new(1, StrategyKind::Rand, 1.5).with_params(params),
        ConsumerAgent::new(2, StrategyKind::Fbs, 1.5)
            .with_theta(theta)
            .with_win_model(WinningFunctionModel::new(WinForm::Simple, 1.8), 2.5),
    ];
    let result = run_market(&MarketConfig { owners, agents, seed: 11 }).unwrap();
    let unsold = result.log.iter().filter(|e| e.outcome.winner.is_none()).count();
    for m in compute_metrics(&result).agents {
        println!(
            "{:<4} {:<6} owners {:>3}  samples {:>6}  spend {:.3}  u.p. {}",
            m.name,
            m.strategy,
            m.num_owners_won,
            m.total_samples,
            m.spend,
            m.unit_price_per_1000.map_or("-".into(), |v| format!("{v:.4}"))
        );
    }
    println!("unsold owners: {unsold}");
}
