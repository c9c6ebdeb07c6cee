use serde::{Deserialize, Serialize};

use super::auction::MarketResult;
use crate::strategy::StrategyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentMetrics {
    pub agent: usize,
    pub name: String,
    pub strategy: StrategyKind,
    pub budget: f64,
    pub num_owners_won: usize,
    pub total_samples: u64,
    pub spend: f64,
    /// Spend per 1,000 acquired samples; absent when nothing was acquired.
    pub unit_price_per_1000: Option<f64>,
    pub fl_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub agents: Vec<AgentMetrics>,
}

pub fn unit_price_per_1000(spend: f64, total_samples: u64) -> Option<f64> {
    (total_samples > 0).then(|| spend / (total_samples as f64 / 1000.0))
}

pub fn compute_metrics(result: &MarketResult) -> MetricsReport {
    let agents = result
        .agents
        .iter()
        .map(|l| AgentMetrics {
            agent: l.agent,
            name: l.name.clone(),
            strategy: l.strategy,
            budget: l.budget,
            num_owners_won: l.won.len(),
            total_samples: l.total_samples,
            spend: l.total_spend,
            unit_price_per_1000: unit_price_per_1000(l.total_spend, l.total_samples),
            fl_accuracy: None,
        })
        .collect();
    MetricsReport { agents }
}
