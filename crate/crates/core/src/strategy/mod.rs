//! Bidding strategies: four heuristic baselines and the two
//! utility-maximizing closed forms, plus the budget multiplier solver and a
//! brute-force reference optimizer.

mod bids;
mod lambda;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bids::{bid_bmub, bid_const, bid_fbc, bid_fbs, bid_lin, bid_rand, check_foc, optimal_bid};
pub use lambda::{expected_spend, solve_lambda, LambdaSolution};
pub use oracle::oracle_optimal_bid;

use crate::win_model::WinForm;

pub const DEFAULT_CONST_BID: f64 = 0.5;
pub const DEFAULT_RAND_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Const,
    Rand,
    Bmub,
    Lin,
    Fbs,
    Fbc,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::Const,
        StrategyKind::Rand,
        StrategyKind::Bmub,
        StrategyKind::Lin,
        StrategyKind::Fbs,
        StrategyKind::Fbc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Const => "const",
            StrategyKind::Rand => "rand",
            StrategyKind::Bmub => "bmub",
            StrategyKind::Lin => "lin",
            StrategyKind::Fbs => "fbs",
            StrategyKind::Fbc => "fbc",
        }
    }

    /// Whether bids depend on an estimated utility.
    pub fn uses_utility(self) -> bool {
        !matches!(self, StrategyKind::Const | StrategyKind::Rand)
    }

    /// Winning-function family for the closed-form strategies.
    pub fn win_form(self) -> Option<WinForm> {
        match self {
            StrategyKind::Fbs => Some(WinForm::Simple),
            StrategyKind::Fbc => Some(WinForm::Complex),
            _ => None,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strategy `{s}`; expected one of const, rand, bmub, lin, fbs, fbc"))
    }
}

/// Per-agent constants for the baseline strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    pub const_bid: f64,
    pub rand_max: f64,
    pub lin_coef: f64,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            const_bid: DEFAULT_CONST_BID,
            rand_max: DEFAULT_RAND_MAX,
            lin_coef: 1.0,
        }
    }
}
