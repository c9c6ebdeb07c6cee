//! Deterministic SVG bar charts of a run's summary, one per metric.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::artifacts::{read_summary, SummaryRow};
use super::experiment::{CalibrationReport, CALIBRATION_JSON, SUMMARY_CSV};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotReport {
    pub files: Vec<PathBuf>,
    pub notices: Vec<String>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

type Metric = (&'static str, &'static str, fn(&SummaryRow) -> Option<f64>);

const METRICS: [Metric; 3] = [
    ("total_samples", "#Total samples", |r| Some(r.total_samples as f64)),
    ("unit_price", "Unit price per 1000 samples", |r| r.unit_price),
    ("accuracy", "FL test accuracy", |r| r.accuracy),
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a bar chart. Missing values get an empty slot labelled `n/a`.
pub fn bar_chart_svg(title: &str, labels: &[String], values: &[Option<f64>]) -> String {
    let max = values.iter().flatten().fold(0.0_f64, |m, &v| m.max(v));
    let scale = if max > 0.0 { (HEIGHT - 2.0 * MARGIN) / max } else { 0.0 };
    let slot = (WIDTH - 2.0 * MARGIN) / labels.len().max(1) as f64;
    let base = HEIGHT - MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for (i, (label, value)) in labels.iter().zip(values).enumerate() {
        let x = MARGIN + i as f64 * slot;
        let cx = x + slot / 2.0;
        match value {
            Some(v) => {
                let h = v * scale;
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue"/>"#,
                    x + slot * 0.15,
                    base - h,
                    slot * 0.7,
                    h
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
                    base - h - 4.0,
                    format_value(*v)
                );
            }
            None => {
                let _ = writeln!(
                    svg,
                    r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">n/a</text>"#,
                    base - 4.0
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            base + 18.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_value(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn budget_tag(budget: f64) -> String {
    format!("{budget}").replace('.', "p")
}

/// Reads `summary.csv` and `calibration.json` from `artifacts_dir` and
/// writes one chart per metric per distinct agent budget into
/// `artifacts_dir/plots`. Chart file names carry the run's master seed.
pub fn emit_plots(artifacts_dir: impl AsRef<Path>) -> Result<PlotReport> {
    let dir = artifacts_dir.as_ref();
    let rows = read_summary(dir.join(SUMMARY_CSV))?;
    let cal_path = dir.join(CALIBRATION_JSON);
    let cal_text = fs::read_to_string(&cal_path).map_err(|e| Error::io(&cal_path, e))?;
    let cal: CalibrationReport = serde_json::from_str(&cal_text)?;

    let mut report = PlotReport {
        files: Vec::new(),
        notices: Vec::new(),
    };
    if rows.is_empty() {
        report.notices.push(format!("{} has no agent rows; no charts written", dir.join(SUMMARY_CSV).display()));
        return Ok(report);
    }

    let mut budgets: Vec<f64> = rows.iter().map(|r| r.budget).collect();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();

    let out = dir.join("plots");
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    for &budget in &budgets {
        let group: Vec<&SummaryRow> = rows.iter().filter(|r| r.budget == budget).collect();
        let labels: Vec<String> = group.iter().map(|r| r.strategy.clone()).collect();
        for (key, title, get) in METRICS {
            let values: Vec<Option<f64>> = group.iter().map(|r| get(r)).collect();
            if values.iter().all(Option::is_none) {
                report.notices.push(format!("no {key} values at budget {budget}; chart skipped"));
                continue;
            }
            let svg = bar_chart_svg(&format!("{title} (budget {budget})"), &labels, &values);
            let path = out.join(format!("{key}_budget{}_seed{}.svg", budget_tag(budget), cal.master_seed));
            fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
            report.files.push(path);
        }
    }
    Ok(report)
}
