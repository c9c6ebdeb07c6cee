use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pool::BidRequest;
use crate::error::{Error, Result};
use crate::estimator::{predict, DEFAULT_CLAMP_EPS};
use crate::strategy::{bid_bmub, bid_const, bid_fbc, bid_fbs, bid_lin, bid_rand, StrategyKind, StrategyParams};
use crate::win_model::WinningFunctionModel;

/// A budget-constrained data consumer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumerAgent {
    pub id: usize,
    pub name: String,
    pub strategy: StrategyKind,
    pub budget: f64,
    pub params: StrategyParams,
    /// Utility estimator parameters; required by utility-driven strategies.
    pub theta: Option<Vec<f64>>,
    pub win_model: Option<WinningFunctionModel>,
    pub lambda: f64,
}

impl ConsumerAgent {
    pub fn new(id: usize, strategy: StrategyKind, budget: f64) -> Self {
        ConsumerAgent {
            id,
            name: format!("dc{id}"),
            strategy,
            budget,
            params: StrategyParams::default(),
            theta: None,
            win_model: None,
            lambda: 0.0,
        }
    }

    pub fn with_params(mut self, params: StrategyParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_win_model(mut self, model: WinningFunctionModel, lambda: f64) -> Self {
        self.win_model = Some(model);
        self.lambda = lambda;
        self
    }

    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(format!("agent {}: {msg}", self.name)));
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return fail(format!("budget must be positive, got {}", self.budget));
        }
        if !(self.lambda >= 0.0) {
            return fail(format!("lambda must be non-negative, got {}", self.lambda));
        }
        match self.strategy {
            StrategyKind::Const if !(self.params.const_bid > 0.0) => return fail("const_bid must be positive".into()),
            StrategyKind::Rand if !(self.params.rand_max > 0.0) => return fail("rand_max must be positive".into()),
            StrategyKind::Lin if !(self.params.lin_coef > 0.0) => return fail("lin_coef must be positive".into()),
            _ => {}
        }
        if self.strategy.uses_utility() && self.theta.is_none() {
            return fail(format!("{} needs a fitted utility estimator", self.strategy));
        }
        if let Some(form) = self.strategy.win_form() {
            match self.win_model {
                Some(m) if m.form == form => {}
                Some(m) => return fail(format!("{} needs a {form:?} winning function, got {:?}", self.strategy, m.form)),
                None => return fail(format!("{} needs a calibrated winning function", self.strategy)),
            }
        }
        Ok(())
    }

    /// Estimated utility of `request`, floored at zero for bidding.
    pub fn estimated_utility(&self, request: &BidRequest) -> f64 {
        self.theta
            .as_deref()
            .map(|theta| predict(theta, &request.features, DEFAULT_CLAMP_EPS).max(0.0))
            .unwrap_or(0.0)
    }

    /// Unclamped bid for `request`. Draws from `rng` only for the random strategies.
    pub fn compute_bid<R: Rng + ?Sized>(&self, request: &BidRequest, rng: &mut R) -> f64 {
        let s = self.estimated_utility(request);
        match self.strategy {
            StrategyKind::Const => bid_const(self.params.const_bid),
            StrategyKind::Rand => bid_rand(self.params.rand_max, rng),
            StrategyKind::Bmub => bid_bmub(s, rng),
            StrategyKind::Lin => bid_lin(s, self.params.lin_coef),
            StrategyKind::Fbs => {
                let m = self.win_model.expect("validated");
                bid_fbs(s, m.c, self.lambda)
            }
            StrategyKind::Fbc => {
                let m = self.win_model.expect("validated");
                bid_fbc(s, m.c, self.lambda)
            }
        }
    }
}
