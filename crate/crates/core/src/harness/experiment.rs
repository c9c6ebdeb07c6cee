//! The two-phase experiment: exploratory bootstrap markets that produce
//! per-consumer history, calibration of each consumer from that history,
//! then one competitive market followed by federated training per consumer.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::artifacts::{market_csv, summary_csv};
use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::estimator::{fit, predict, true_utility, HistoryRecord};
use crate::fl::{load_idx, FlEnvironment};
use crate::market::{
    compute_metrics, generate_do_pool, run_market, ConsumerAgent, DataOwner, MarketConfig, MarketResult,
    MetricsReport,
};
use crate::seed::{derive_seed, Stream};
use crate::strategy::{solve_lambda, LambdaSolution, StrategyKind, StrategyParams};
use crate::win_model::{calibrate_c, empirical_win_curve, WinForm, WinningFunctionModel};

pub const SCHEMA_VERSION: u32 = 1;

/// Budget given to every agent during bootstrap so that each one bids on
/// every request.
pub const BOOTSTRAP_BUDGET: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentCalibration {
    pub agent: usize,
    pub name: String,
    pub strategy: StrategyKind,
    pub budget: f64,
    pub history_len: usize,
    pub wins: usize,
    pub theta: Option<Vec<f64>>,
    pub estimator_step: Option<f64>,
    pub estimator_initial_loss: Option<f64>,
    pub estimator_final_loss: Option<f64>,
    pub lin_coef: Option<f64>,
    pub win_form: Option<WinForm>,
    pub c_hat: Option<f64>,
    pub lambda: Option<LambdaSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub schema_version: u32,
    pub master_seed: u64,
    pub budget_scale: f64,
    pub pool_size: usize,
    pub bootstrap_rounds: usize,
    pub bootstrap_auctions: usize,
    pub agents: Vec<AgentCalibration>,
}

#[derive(Debug, Clone)]
pub struct BootstrapOutcome {
    /// One history per agent, in agent order.
    pub histories: Vec<Vec<HistoryRecord>>,
    /// Agents ready for the competitive market.
    pub agents: Vec<ConsumerAgent>,
    pub report: CalibrationReport,
}

/// Agents as configured, before any calibration.
pub fn configured_agents(config: &RunConfig) -> Vec<ConsumerAgent> {
    let params = StrategyParams {
        const_bid: config.const_bid,
        rand_max: config.rand_max,
        lin_coef: config.lin_coef.unwrap_or(1.0),
    };
    config
        .strategies
        .iter()
        .zip(config.agent_budgets())
        .enumerate()
        .map(|(id, (&kind, budget))| ConsumerAgent::new(id, kind, budget).with_params(params))
        .collect()
}

/// Runs `bootstrap_rounds` exploratory markets over `owners` in which every
/// agent bids uniformly at random and budgets do not bind, and returns each
/// agent's view of them.
pub fn collect_history(config: &RunConfig, owners: &[DataOwner]) -> Result<Vec<Vec<HistoryRecord>>> {
    let n_agents = config.strategies.len();
    let explorers: Vec<ConsumerAgent> = (0..n_agents)
        .map(|id| {
            ConsumerAgent::new(id, StrategyKind::Rand, BOOTSTRAP_BUDGET).with_params(StrategyParams {
                rand_max: config.rand_max,
                ..Default::default()
            })
        })
        .collect();
    let mut histories = vec![Vec::new(); n_agents];
    for round in 0..config.bootstrap_rounds {
        let market = MarketConfig {
            owners: owners.to_vec(),
            agents: explorers.clone(),
            seed: derive_seed(config.master_seed, Stream::Bootstrap, round as u64),
        };
        let result = run_market(&market)?;
        for entry in &result.log {
            let outcome = &entry.outcome;
            for bid in &outcome.bids {
                let won = outcome.winner == Some(bid.agent);
                histories[bid.agent].push(HistoryRecord {
                    features: outcome.request.features,
                    realized_utility: won.then(|| true_utility(&entry.owner)),
                    bid: bid.value,
                    won,
                    clearing_price: if won { outcome.clearing_price } else { 0.0 },
                });
            }
        }
    }
    Ok(histories)
}

/// Collects bootstrap history, then fits every utility-driven agent's
/// estimator and calibrates the winning function and budget multiplier of the
/// closed-form agents.
pub fn bootstrap_history(config: &RunConfig, owners: &[DataOwner]) -> Result<BootstrapOutcome> {
    let histories = collect_history(config, owners)?;
    let mut agents = configured_agents(config);
    let mut calibrations = Vec::with_capacity(agents.len());
    let estimator = config.estimator_params();

    for (agent, history) in agents.iter_mut().zip(&histories) {
        let wins = history.iter().filter(|r| r.won).count();
        let mut cal = AgentCalibration {
            agent: agent.id,
            name: agent.name.clone(),
            strategy: agent.strategy,
            budget: agent.budget,
            history_len: history.len(),
            wins,
            theta: None,
            estimator_step: None,
            estimator_initial_loss: None,
            estimator_final_loss: None,
            lin_coef: None,
            win_form: None,
            c_hat: None,
            lambda: None,
        };
        if agent.strategy.uses_utility() {
            if wins == 0 {
                return Err(Error::InsufficientData(format!(
                    "agent {} ({}) won no bootstrap auctions; raise bootstrap_rounds or rand_max",
                    agent.name, agent.strategy
                )));
            }
            // The loss sums over records, so the step is normalized by their count.
            let params = crate::estimator::EstimatorParams {
                learning_rate: estimator.learning_rate / wins as f64,
                ..estimator
            };
            let fitted = fit(history, &params)?;
            let samples: Vec<f64> = history
                .iter()
                .map(|r| predict(&fitted.theta, &r.features, estimator.clamp_eps).max(0.0))
                .collect();
            cal.estimator_step = Some(params.learning_rate);
            cal.estimator_initial_loss = Some(fitted.initial_loss);
            cal.estimator_final_loss = Some(fitted.final_loss);
            cal.theta = Some(fitted.theta.clone());
            agent.theta = Some(fitted.theta);

            if agent.strategy == StrategyKind::Lin {
                let coef = match config.lin_coef {
                    Some(c) => c,
                    None => {
                        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
                        if mean > 0.0 {
                            config.const_bid / mean
                        } else {
                            1.0
                        }
                    }
                };
                agent.params.lin_coef = coef;
                cal.lin_coef = Some(coef);
            }

            if let Some(form) = agent.strategy.win_form() {
                let curve = empirical_win_curve(history, config.num_buckets)?;
                let c = calibrate_c(&curve, form)?;
                let model = WinningFunctionModel::new(form, c);
                let solution = solve_lambda(&samples, &model, agent.budget, owners.len());
                agent.win_model = Some(model);
                agent.lambda = solution.lambda;
                cal.win_form = Some(form);
                cal.c_hat = Some(c);
                cal.lambda = Some(solution);
            }
        }
        calibrations.push(cal);
    }

    Ok(BootstrapOutcome {
        report: CalibrationReport {
            schema_version: SCHEMA_VERSION,
            master_seed: config.master_seed,
            budget_scale: config.budget_scale,
            pool_size: owners.len(),
            bootstrap_rounds: config.bootstrap_rounds,
            bootstrap_auctions: config.bootstrap_rounds * owners.len(),
            agents: calibrations,
        },
        histories,
        agents,
    })
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config: RunConfig,
    pub market: MarketResult,
    pub metrics: MetricsReport,
    pub calibration: CalibrationReport,
    pub market_csv: String,
    pub summary_csv: String,
    pub calibration_json: String,
}

pub const MARKET_CSV: &str = "market.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const CALIBRATION_JSON: &str = "calibration.json";
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

impl RunArtifacts {
    /// Writes every artifact into `dir`, creating it if needed.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = [
            (MARKET_CSV, self.market_csv.as_str()),
            (SUMMARY_CSV, self.summary_csv.as_str()),
            (CALIBRATION_JSON, self.calibration_json.as_str()),
            (RESOLVED_CONFIG, &self.config.to_toml_string()),
        ];
        files
            .iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}

fn fl_environment(config: &RunConfig) -> Result<FlEnvironment> {
    let settings = config.fl_settings()?;
    if config.uses_idx() {
        let path = |p: &Option<PathBuf>| p.clone().expect("validated together");
        let train = load_idx(path(&config.idx_train_images), path(&config.idx_train_labels))?;
        let test = load_idx(path(&config.idx_test_images), path(&config.idx_test_labels))?;
        Ok(FlEnvironment::from_idx(settings, train, test, config.master_seed))
    } else {
        Ok(FlEnvironment::synthetic(settings, config.master_seed))
    }
}

/// Bootstrap, competitive market and (optionally) federated training for one
/// configuration. Errors carry the phase they came from.
pub fn run_experiment(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let owners = generate_do_pool(
        config.pool_size,
        (config.sample_min, config.sample_max),
        config.master_seed,
    )
    .map_err(|e| e.in_phase("setup"))?;
    let boot = bootstrap_history(config, &owners).map_err(|e| e.in_phase("bootstrap"))?;
    let market = run_market(&MarketConfig {
        owners,
        agents: boot.agents,
        seed: config.master_seed,
    })
    .map_err(|e| e.in_phase("market"))?;
    let mut metrics = compute_metrics(&market);

    if config.train_fl {
        let env = fl_environment(config).map_err(|e| e.in_phase("training"))?;
        for m in metrics.agents.iter_mut() {
            let cohort = env
                .train_cohort(&market.won_owners(m.agent))
                .map_err(|e| e.in_phase("training"))?;
            m.fl_accuracy = Some(cohort.accuracy);
        }
    }

    let partition = config.partition().map_err(|e| e.in_phase("output"))?;
    Ok(RunArtifacts {
        market_csv: market_csv(&market).map_err(|e| e.in_phase("output"))?,
        summary_csv: summary_csv(&metrics, partition).map_err(|e| e.in_phase("output"))?,
        calibration_json: serde_json::to_string_pretty(&boot.report).map_err(|e| Error::from(e).in_phase("output"))?,
        config: config.clone(),
        market,
        metrics,
        calibration: boot.report,
    })
}
