use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::agent::ConsumerAgent;
use super::pool::{make_bid_request, BidRequest, DataOwner};
use crate::error::{Error, Result};
use crate::seed::{stream_rng, Stream};
use crate::strategy::StrategyKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub agent: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub request: BidRequest,
    pub bids: Vec<Bid>,
    pub winner: Option<usize>,
    /// Winner's own bid (first price); zero when unsold.
    pub clearing_price: f64,
}

/// First-price sealed-bid auction. The highest positive bid wins and pays
/// itself; exact ties are broken uniformly with `tie_rng`, which is only
/// consumed when a tie occurs.
pub fn run_auction<R: Rng + ?Sized>(request: BidRequest, bids: Vec<Bid>, tie_rng: &mut R) -> AuctionOutcome {
    let top = bids.iter().map(|b| b.value).fold(f64::NEG_INFINITY, f64::max);
    let (winner, clearing_price) = if top > 0.0 {
        let leaders: Vec<usize> = bids.iter().filter(|b| b.value == top).map(|b| b.agent).collect();
        let pick = if leaders.len() == 1 {
            leaders[0]
        } else {
            leaders[tie_rng.random_range(0..leaders.len())]
        };
        (Some(pick), top)
    } else {
        (None, 0.0)
    };
    AuctionOutcome {
        request,
        bids,
        winner,
        clearing_price,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketConfig {
    pub owners: Vec<DataOwner>,
    pub agents: Vec<ConsumerAgent>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedAuction {
    /// Position in the shuffled request stream.
    pub round: usize,
    pub owner: DataOwner,
    pub outcome: AuctionOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentLedger {
    pub agent: usize,
    pub name: String,
    pub strategy: StrategyKind,
    pub budget: f64,
    /// Indices into [`MarketResult::log`] of the auctions this agent won.
    pub won: Vec<usize>,
    pub total_spend: f64,
    pub total_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketResult {
    pub agents: Vec<AgentLedger>,
    pub log: Vec<LoggedAuction>,
    pub seed: u64,
}

impl MarketResult {
    pub fn won_auctions(&self, agent: usize) -> impl Iterator<Item = &LoggedAuction> {
        self.agents[agent].won.iter().map(move |&i| &self.log[i])
    }

    pub fn won_owners(&self, agent: usize) -> Vec<DataOwner> {
        self.won_auctions(agent).map(|a| a.owner).collect()
    }
}

/// Largest bid not above `raw` that keeps `spent + bid <= budget` exactly in
/// floating point.
fn affordable(raw: f64, spent: f64, budget: f64) -> f64 {
    let mut b = raw.min(budget - spent).max(0.0);
    while b > 0.0 && spent + b > budget {
        b = b.next_down();
    }
    b
}

/// Runs one pass over the owner pool in a seeded random order.
///
/// Every agent draws its bid for every request (keeping each agent's random
/// stream aligned across runs) but only agents with budget left submit it,
/// clamped to what they can still afford. Once all budgets are exhausted the
/// remaining requests are logged as unsold.
pub fn run_market(config: &MarketConfig) -> Result<MarketResult> {
    if config.agents.is_empty() {
        return Err(Error::Config("market needs at least one consumer agent".into()));
    }
    if config.owners.is_empty() {
        return Err(Error::Config("market needs at least one data owner".into()));
    }
    for (i, a) in config.agents.iter().enumerate() {
        if a.id != i {
            return Err(Error::Config(format!("agent ids must be 0..n in order; found {} at {i}", a.id)));
        }
        a.validate()?;
    }

    let pool_size = config.owners.len();
    let mut order: Vec<usize> = (0..pool_size).collect();
    order.shuffle(&mut stream_rng(config.seed, Stream::RequestOrder, 0));
    let mut bid_rngs: Vec<_> = config
        .agents
        .iter()
        .map(|a| stream_rng(config.seed, Stream::AgentBids, a.id as u64))
        .collect();
    let mut tie_rng = stream_rng(config.seed, Stream::Ties, 0);

    let mut spent = vec![0.0_f64; config.agents.len()];
    let mut ledgers: Vec<AgentLedger> = config
        .agents
        .iter()
        .map(|a| AgentLedger {
            agent: a.id,
            name: a.name.clone(),
            strategy: a.strategy,
            budget: a.budget,
            won: Vec::new(),
            total_spend: 0.0,
            total_samples: 0,
        })
        .collect();
    let mut log = Vec::with_capacity(pool_size);

    for (round, &idx) in order.iter().enumerate() {
        let owner = config.owners[idx];
        let request = make_bid_request(&owner, pool_size);
        let mut bids = Vec::with_capacity(config.agents.len());
        for (agent, rng) in config.agents.iter().zip(bid_rngs.iter_mut()) {
            let raw = agent.compute_bid(&request, rng);
            let s = spent[agent.id];
            if s < agent.budget {
                bids.push(Bid {
                    agent: agent.id,
                    value: affordable(raw, s, agent.budget),
                });
            }
        }
        let outcome = run_auction(request, bids, &mut tie_rng);
        if let Some(w) = outcome.winner {
            spent[w] += outcome.clearing_price;
            let ledger = &mut ledgers[w];
            ledger.won.push(log.len());
            ledger.total_spend = spent[w];
            ledger.total_samples += owner.num_samples as u64;
        }
        log.push(LoggedAuction { round, owner, outcome });
    }

    Ok(MarketResult {
        agents: ledgers,
        log,
        seed: config.seed,
    })
}
