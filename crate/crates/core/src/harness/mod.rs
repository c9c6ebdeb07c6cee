//! Configuration, experiment orchestration, artifacts and plotting.

mod artifacts;
pub mod config;
mod experiment;
mod plot;
mod sweep;

pub use artifacts::{
    market_csv, read_summary, summary_csv, summary_header, totals_from_market_csv, SummaryRow, MARKET_HEADER,
};
pub use config::{parse_config, PartitionKind, RunConfig};
pub use experiment::{
    bootstrap_history, collect_history, configured_agents, run_experiment, AgentCalibration, BootstrapOutcome,
    CalibrationReport, RunArtifacts, BOOTSTRAP_BUDGET, CALIBRATION_JSON, MARKET_CSV, RESOLVED_CONFIG,
    SCHEMA_VERSION, SUMMARY_CSV,
};
pub use plot::{bar_chart_svg, emit_plots, PlotReport};
pub use sweep::{list_configs, sweep, SweepEntry};
