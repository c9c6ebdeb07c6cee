use std::fs;
use std::process::Command;

use afl_market::harness::{
    bootstrap_history, emit_plots, read_summary, run_experiment, sweep, totals_from_market_csv, RunConfig,
    MARKET_CSV, SUMMARY_CSV,
};
use afl_market::market::generate_do_pool;
use afl_market::strategy::StrategyKind;
use afl_market::Error;

fn quick(seed: u64) -> RunConfig {
    RunConfig {
        train_fl: false,
        ..RunConfig::with_seed(seed)
    }
}

#[test]
fn summary_schema_is_pinned() {
    let a = run_experiment(&RunConfig::with_seed(7)).unwrap();
    let mut lines = a.summary_csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "agent,strategy,budget,total_samples,unit_price,spend,accuracy_iid"
    );
    assert_eq!(lines.count(), 6);
    assert_eq!(
        a.market_csv.lines().next().unwrap(),
        "auction,owner_id,num_samples,quality,winner,clearing_price,bids"
    );

    let niid = run_experiment(&RunConfig {
        partition: afl_market::harness::PartitionKind::Niid,
        ..quick(7)
    })
    .unwrap();
    assert!(niid.summary_csv.starts_with("agent,strategy,budget,total_samples,unit_price,spend,accuracy_niid\n"));
}

#[test]
fn unit_price_recomputes_from_market_rows() {
    let dir = tempfile::tempdir().unwrap();
    for budget in [50.0, 300.0] {
        let config = RunConfig { budget, ..quick(3) };
        let a = run_experiment(&config).unwrap();
        a.write_to(dir.path()).unwrap();
        let rows = read_summary(dir.path().join(SUMMARY_CSV)).unwrap();
        let totals = totals_from_market_csv(&fs::read_to_string(dir.path().join(MARKET_CSV)).unwrap()).unwrap();
        for row in &rows {
            assert!(row.spend <= row.budget);
            match totals.iter().find(|t| t.0 == row.agent) {
                Some((_, spend, samples)) => {
                    assert_eq!(*samples, row.total_samples);
                    let up = spend / (*samples as f64 / 1000.0);
                    assert!((up - row.unit_price.unwrap()).abs() <= 1e-9);
                }
                None => {
                    assert_eq!(row.total_samples, 0);
                    assert_eq!(row.unit_price, None);
                }
            }
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::with_seed(19);
    run_experiment(&config).unwrap().write_to(dir.path().join("a")).unwrap();
    run_experiment(&config).unwrap().write_to(dir.path().join("b")).unwrap();
    for name in ["market.csv", "summary.csv", "calibration.json", "resolved_config.toml"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn zero_bootstrap_rounds_fails_for_utility_agents() {
    let err = run_experiment(&RunConfig {
        bootstrap_rounds: 0,
        ..quick(1)
    })
    .unwrap_err();
    let Error::Phase { phase, source } = &err else {
        panic!("expected a phase error, got {err}");
    };
    assert_eq!(*phase, "bootstrap");
    assert!(matches!(**source, Error::InsufficientData(_)));
    assert!(err.to_string().contains("bootstrap_rounds"));

    // baselines that need no history still run
    let ok = run_experiment(&RunConfig {
        bootstrap_rounds: 0,
        strategies: vec![StrategyKind::Const, StrategyKind::Rand],
        ..quick(1)
    });
    assert!(ok.is_ok());
}

#[test]
fn bootstrap_of_two_thousand_auctions_calibrates_every_fb_agent() {
    let config = quick(5);
    let owners = generate_do_pool(config.pool_size, (config.sample_min, config.sample_max), 5).unwrap();
    let boot = bootstrap_history(&config, &owners).unwrap();
    assert_eq!(boot.report.bootstrap_auctions, 2000);
    let fb: Vec<_> = boot.report.agents.iter().filter(|a| a.strategy.win_form().is_some()).collect();
    assert_eq!(fb.len(), 2);
    for a in fb {
        let c = a.c_hat.unwrap();
        let lambda = a.lambda.unwrap().lambda;
        assert!(c.is_finite() && c > 0.0);
        assert!(lambda.is_finite() && lambda >= 0.0);
    }
    let again = bootstrap_history(&config, &owners).unwrap();
    assert_eq!(boot.report, again.report);
}

#[test]
fn plots_per_metric_and_budget_are_seed_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        budgets: Some(vec![50.0, 50.0, 150.0, 150.0, 300.0, 300.0]),
        ..RunConfig::with_seed(77)
    };
    run_experiment(&config).unwrap().write_to(dir.path()).unwrap();
    let report = emit_plots(dir.path()).unwrap();
    assert_eq!(report.files.len(), 9);
    assert!(report.notices.is_empty());
    for f in &report.files {
        let name = f.file_name().unwrap().to_string_lossy();
        assert!(name.ends_with("_seed77.svg"), "{name}");
        assert!(fs::read_to_string(f).unwrap().starts_with("<svg"));
    }
    let first: Vec<_> = report.files.iter().map(|f| fs::read(f).unwrap()).collect();
    let again = emit_plots(dir.path()).unwrap();
    let second: Vec<_> = again.files.iter().map(|f| fs::read(f).unwrap()).collect();
    assert_eq!(first, second);
}

#[test]
fn market_only_run_plots_only_market_metrics() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&quick(2)).unwrap().write_to(dir.path()).unwrap();
    let report = emit_plots(dir.path()).unwrap();
    assert_eq!(report.files.len(), 2);
    assert_eq!(report.notices.len(), 1);
}

#[test]
fn empty_summary_gives_notice_and_no_charts() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&quick(2)).unwrap().write_to(dir.path()).unwrap();
    let summary = dir.path().join(SUMMARY_CSV);
    let header = fs::read_to_string(&summary).unwrap().lines().next().unwrap().to_string();
    fs::write(&summary, header + "\n").unwrap();
    let report = emit_plots(dir.path()).unwrap();
    assert!(report.files.is_empty());
    assert_eq!(report.notices.len(), 1);
    assert!(!dir.path().join("plots").exists());
}

#[test]
fn sweep_isolates_outputs_and_failures() {
    let configs = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    fs::write(configs.path().join("low.toml"), "master_seed = 1\ntrain_fl = false\nbudget = 50.0\n").unwrap();
    fs::write(configs.path().join("high.toml"), "master_seed = 1\ntrain_fl = false\nbudget = 300.0\n").unwrap();
    fs::write(configs.path().join("bad.toml"), "master_seed = 1\nbudgt = 3.0\n").unwrap();
    fs::write(configs.path().join("notes.txt"), "ignored").unwrap();
    let entries = sweep(configs.path(), Some(out.path()), Some(9)).unwrap();
    assert_eq!(entries.len(), 3);
    let bad = entries.iter().find(|e| e.config_path.ends_with("bad.toml")).unwrap();
    assert!(matches!(bad.result, Err(Error::UnknownKey { .. })));
    for stem in ["low", "high"] {
        let resolved = fs::read_to_string(out.path().join(stem).join("resolved_config.toml")).unwrap();
        assert!(resolved.contains("master_seed = 9"));
    }
}

#[test]
fn cli_run_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "master_seed = 4\ntrain_fl = false\n").unwrap();
    let out = dir.path().join("out");
    let bin = env!("CARGO_BIN_EXE_afl-market");
    let run = Command::new(bin)
        .args(["run", config.to_str().unwrap(), "--seed", "12", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("master_seed = 12"));
    assert!(stdout.contains("pool_size = 100"));
    assert!(out.join(SUMMARY_CSV).exists());

    let plot = Command::new(bin).args(["plot", out.to_str().unwrap()]).output().unwrap();
    assert!(plot.status.success());
    assert!(out.join("plots").join("total_samples_budget0p5_seed12.svg").exists());

    fs::write(&config, "master_seed = 4\nbudget = -1\n").unwrap();
    let bad = Command::new(bin).args(["run", config.to_str().unwrap()]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("budget"));
}
