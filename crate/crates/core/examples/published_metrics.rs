//! Feed the transcribed published outcomes through the metric pipeline.
//!
//! cargo run --example published_metrics

use std::path::Path;

use pddl_engine::bench::{
    compute_metrics, hard_case_analysis, plan_length_table, read_log, render_hard_cases, render_plan_length_table,
    render_report, unsolved_by_all, MetricsOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures/published_outcomes.jsonl");
    let records = read_log(&path)?;

    let report = compute_metrics(&records, &MetricsOptions::default())?;
    print!("{}", render_report(&report));

    let fd = ["FD lama-first".to_string(), "FD seq-sat-lama-2011".to_string()];
    println!("\nClassical planners by block");
    print!("{}", render_plan_length_table(&plan_length_table(&records, &fd, 10)?));

    let hard = unsolved_by_all(&records, &fd)?;
    println!();
    print!("{}", render_hard_cases(&hard_case_analysis(&records, &hard)?));
    Ok(())
}
