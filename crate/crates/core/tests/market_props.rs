use afl_market::market::{generate_do_pool, run_market, ConsumerAgent, MarketConfig, MarketResult};
use afl_market::strategy::{StrategyKind, StrategyParams};
use proptest::prelude::*;

fn mixed_market(seed: u64, budgets: [f64; 3], const_bid: f64) -> MarketConfig {
    let owners = generate_do_pool(60, (1000, 10_000), seed).unwrap();
    let params = StrategyParams {
        const_bid,
        rand_max: 1.0,
        lin_coef: 0.5,
    };
    let agents = vec![
        ConsumerAgent::new(0, StrategyKind::Const, budgets[0]).with_params(params),
        ConsumerAgent::new(1, StrategyKind::Rand, budgets[1]).with_params(params),
        ConsumerAgent::new(2, StrategyKind::Lin, budgets[2])
            .with_params(params)
            .with_theta(vec![0.1, 1.0, 2.0]),
    ];
    MarketConfig { owners, agents, seed }
}

fn assert_prefix_budget_safe(result: &MarketResult) {
    let mut spent = vec![0.0; result.agents.len()];
    for entry in &result.log {
        if let Some(w) = entry.outcome.winner {
            spent[w] += entry.outcome.clearing_price;
            assert!(
                spent[w] <= result.agents[w].budget,
                "agent {w} overspent: {} > {}",
                spent[w],
                result.agents[w].budget
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spend_never_exceeds_budget_on_any_prefix(
        seed in any::<u64>(),
        b0 in 0.01f64..5.0,
        b1 in 0.01f64..5.0,
        b2 in 0.01f64..5.0,
        const_bid in 0.01f64..2.0,
    ) {
        let result = run_market(&mixed_market(seed, [b0, b1, b2], const_bid)).unwrap();
        assert_prefix_budget_safe(&result);
        for l in &result.agents {
            prop_assert!(l.total_spend <= l.budget);
        }
    }

    #[test]
    fn owners_are_conserved(seed in any::<u64>(), b in 0.01f64..10.0) {
        let config = mixed_market(seed, [b, b, b], 0.3);
        let result = run_market(&config).unwrap();
        prop_assert_eq!(result.log.len(), config.owners.len());
        let mut seen = vec![0usize; config.owners.len() + 1];
        for l in &result.agents {
            for entry in result.won_auctions(l.agent) {
                seen[entry.owner.id as usize] += 1;
            }
        }
        let won: usize = seen.iter().sum();
        let unsold = result.log.iter().filter(|e| e.outcome.winner.is_none()).count();
        prop_assert_eq!(won + unsold, config.owners.len());
        prop_assert!(seen.iter().all(|&k| k <= 1));
    }

    #[test]
    fn const_wins_never_drop_when_its_budget_rises(
        seed in any::<u64>(),
        low in 0.05f64..3.0,
        extra in 0.0f64..5.0,
        const_bid in 0.05f64..1.0,
    ) {
        let wins = |b: f64| {
            let result = run_market(&mixed_market(seed, [b, 2.0, 2.0], const_bid)).unwrap();
            result.agents[0].won.len()
        };
        prop_assert!(wins(low + extra) >= wins(low));
    }
}

#[test]
fn identical_seed_gives_identical_serialized_log() {
    let config = mixed_market(42, [1.0, 1.5, 2.0], 0.4);
    let a = serde_json::to_string(&run_market(&config).unwrap()).unwrap();
    let b = serde_json::to_string(&run_market(&config).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = serde_json::to_string(&run_market(&mixed_market(43, [1.0, 1.5, 2.0], 0.4)).unwrap()).unwrap();
    assert_ne!(a, other);
}
