//! Data-owner pool, sealed-bid auctions and the sequential market loop.

mod agent;
mod auction;
mod metrics;
mod pool;

pub use agent::ConsumerAgent;
pub use auction::{run_auction, run_market, AgentLedger, AuctionOutcome, Bid, LoggedAuction, MarketConfig, MarketResult};
pub use metrics::{compute_metrics, AgentMetrics, MetricsReport};
pub use pool::{
    generate_do_pool, make_bid_request, tier_for, BidRequest, DataOwner, Features, QualityTier, FEATURE_DIM,
    QUANTITY_SCALE,
};
