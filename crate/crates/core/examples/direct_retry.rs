//! The direct adapter against a scripted model that fails in realistic ways:
//! a transport error, prose without a plan, an illegal plan, then a good one.

use std::time::Duration;

use pddl_engine::agents::{extract_plan, DirectAdapter, Planner, PlanningTask};
use pddl_engine::blocksworld::DOMAIN;
use pddl_engine::llm::{LlmError, Retrying, ScriptedClient, ScriptedTurn};

const GOOD: &str = "Here is the plan:\n```\n1. (unstack c a)\n2. (put-down c)\n3. (pick-up b)\n4. (stack b c)\n5. (pick-up a)\n6. (stack a b)\n```";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = ScriptedClient::new(vec![
        ScriptedTurn::Fail(LlmError::Transient("HTTP 529 overloaded".into())),
        ScriptedTurn::text("I think block a should move first.").with_usage(900, 40),
        ScriptedTurn::text("```\n(pick-up a)\n(stack a b)\n```").with_usage(900, 25),
        ScriptedTurn::text(GOOD).with_usage(900, 60),
    ]);
    let client = Retrying::with_backoff(script, Duration::from_millis(20), Duration::from_millis(200));

    println!("extracted from the good reply: {:?}", extract_plan(GOOD).map(|p| p.len()));

    let task = PlanningTask::from_text("sussman", DOMAIN, include_str!("../data/blocksworld/sussman.pddl"));
    let out = DirectAdapter::new(Box::new(client)).solve(&task, Duration::from_secs(10))?;
    println!(
        "status {} after {} attempts, plan length {:?}, tokens in/out {}/{}",
        out.status.as_str(),
        out.attempts,
        out.plan_length(),
        out.tokens_in,
        out.tokens_out
    );
    Ok(())
}
