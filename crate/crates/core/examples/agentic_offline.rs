//! The agentic adapter with a scripted policy in place of a model. The
//! policy follows an optimal plan through the MCP tools, checking each
//! action is applicable before executing it.
//!
//! cargo run --example agentic_offline

use std::time::Duration;

use pddl_engine::agents::{oracle_policy, unsolvable_policy, AgenticAdapter, Planner, PlanningTask};
use pddl_engine::blocksworld::{random_problem, DOMAIN};
use pddl_engine::mcp::McpServer;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut tasks = vec![PlanningTask::from_text(
        "sussman",
        DOMAIN,
        include_str!("../data/blocksworld/sussman.pddl"),
    )];
    for n in 3..=5 {
        tasks.push(PlanningTask::from_text(format!("random-{n}"), DOMAIN, random_problem("r", n, &mut rng)));
    }

    for task in &tasks {
        let policy = oracle_policy(task)?;
        let mut adapter = AgenticAdapter::new(Box::new(policy), Box::new(McpServer::new()));
        let out = adapter.solve(task, Duration::from_secs(30))?;
        println!(
            "{:<10} {:<9} plan {:>3}  tokens {:>6} (estimated {})  {:.3}s",
            task.name,
            out.status.as_str(),
            out.plan_length().map_or("-".into(), |n| n.to_string()),
            out.tokens_in + out.tokens_out,
            out.tokens_estimated,
            out.wall_time
        );
    }

    // A policy that gives up is an early exit, not a timeout.
    let mut quitter = AgenticAdapter::new(Box::new(unsolvable_policy()), Box::new(McpServer::new()));
    let out = quitter.solve(&tasks[0], Duration::from_secs(5))?;
    println!("quitter: {}", out.status.as_str());
    Ok(())
}
