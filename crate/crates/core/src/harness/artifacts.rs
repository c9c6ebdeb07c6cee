//! CSV schemas for the market log and the per-agent summary.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fl::Partition;
use crate::market::{MarketResult, MetricsReport};

pub const MARKET_HEADER: [&str; 7] = ["auction", "owner_id", "num_samples", "quality", "winner", "clearing_price", "bids"];

pub fn summary_header(partition: Partition) -> [String; 7] {
    [
        "agent".into(),
        "strategy".into(),
        "budget".into(),
        "total_samples".into(),
        "unit_price".into(),
        "spend".into(),
        format!("accuracy_{}", partition.label()),
    ]
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per auction; `bids` lists `agent=value` pairs separated by `;`.
pub fn market_csv(result: &MarketResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MARKET_HEADER)?;
    for entry in &result.log {
        let o = &entry.outcome;
        let winner = o.winner.map(|a| result.agents[a].name.clone()).unwrap_or_default();
        let bids = o
            .bids
            .iter()
            .map(|b| format!("{}={}", result.agents[b.agent].name, b.value))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            entry.round.to_string(),
            entry.owner.id.to_string(),
            entry.owner.num_samples.to_string(),
            entry.owner.quality_tier.as_str().to_string(),
            winner,
            o.clearing_price.to_string(),
            bids,
        ])?;
    }
    finish(w)
}

pub fn summary_csv(metrics: &MetricsReport, partition: Partition) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(summary_header(partition))?;
    for m in &metrics.agents {
        w.write_record([
            m.name.clone(),
            m.strategy.to_string(),
            m.budget.to_string(),
            m.total_samples.to_string(),
            m.unit_price_per_1000.map(|v| v.to_string()).unwrap_or_default(),
            m.spend.to_string(),
            m.fl_accuracy.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub agent: String,
    pub strategy: String,
    pub budget: f64,
    pub total_samples: u64,
    pub unit_price: Option<f64>,
    pub spend: f64,
    pub accuracy: Option<f64>,
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Config(format!("bad number `{s}` in summary")))
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| Error::Config(format!("bad number `{}` in {}", field(i), path.display())))
        };
        rows.push(SummaryRow {
            agent: field(0).to_string(),
            strategy: field(1).to_string(),
            budget: num(2)?,
            total_samples: num(3)? as u64,
            unit_price: parse_opt(field(4))?,
            spend: num(5)?,
            accuracy: parse_opt(field(6))?,
        });
    }
    Ok(rows)
}

/// Per-agent `(spend, samples)` totals recomputed from a market CSV body.
pub fn totals_from_market_csv(body: &str) -> Result<Vec<(String, f64, u64)>> {
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let mut totals: Vec<(String, f64, u64)> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let winner = rec.get(4).unwrap_or("");
        if winner.is_empty() {
            continue;
        }
        let price: f64 = rec.get(5).unwrap_or("").parse().map_err(|_| Error::Config("bad clearing_price".into()))?;
        let n: u64 = rec.get(2).unwrap_or("").parse().map_err(|_| Error::Config("bad num_samples".into()))?;
        match totals.iter_mut().find(|t| t.0 == winner) {
            Some(t) => {
                t.1 += price;
                t.2 += n;
            }
            None => totals.push((winner.to_string(), price, n)),
        }
    }
    Ok(totals)
}
