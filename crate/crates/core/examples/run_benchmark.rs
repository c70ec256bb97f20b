//! Run built-in adapters over the shipped Blocksworld suite, log every run
//! to JSONL and print the metric report.
//!
//! cargo run --release --example run_benchmark [manifest.txt]

use std::path::PathBuf;
use std::time::Duration;

use pddl_engine::agents::{oracle_policy, AgenticAdapter, OracleAdapter, Planner, SearchMode};
use pddl_engine::bench::{
    compute_metrics, load_manifest, read_log, render_report, run_suite, MetricsOptions, NamedAdapter, SuiteOptions,
};
use pddl_engine::mcp::McpServer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let manifest = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/blocksworld/manifest.txt")));
    let tasks = load_manifest(&manifest)?;

    let adapters = vec![
        NamedAdapter::new("optimal", |_| Ok(Box::new(OracleAdapter::new(SearchMode::Optimal)) as Box<dyn Planner>)),
        NamedAdapter::new("greedy", |_| Ok(Box::new(OracleAdapter::new(SearchMode::Greedy)) as Box<dyn Planner>)),
        NamedAdapter::new("scripted-agentic", |task| {
            let policy = oracle_policy(task)?;
            Ok(Box::new(AgenticAdapter::new(Box::new(policy), Box::new(McpServer::new()))) as Box<dyn Planner>)
        }),
    ];

    let dir = tempfile::tempdir()?;
    let log = dir.path().join("runs.jsonl");
    let opts = SuiteOptions {
        budget: Duration::from_secs(30),
        parallelism: 4,
        log_path: Some(log.clone()),
        ..SuiteOptions::default()
    };
    run_suite(&tasks, &adapters, &opts, |r| {
        println!("{:<16} {:<18} {:?} {:?}", r.name, r.approach, r.status, r.plan_length);
    })?;

    let records = read_log(&log)?;
    let report = compute_metrics(&records, &MetricsOptions { block_size: 2, ..MetricsOptions::default() })?;
    println!();
    print!("{}", render_report(&report));
    Ok(())
}
