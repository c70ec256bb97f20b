//! Run the direct and agentic adapters against a real model.
//!
//! Needs network access and an API key in the environment:
//!
//! ANTHROPIC_API_KEY=... cargo run --example live_llm -- anthropic claude-haiku-4-5
//! OPENAI_API_KEY=... cargo run --example live_llm -- openai gpt-4o-mini

use std::time::Duration;

use pddl_engine::agents::{AgenticAdapter, DirectAdapter, Planner, PlanningTask};
use pddl_engine::blocksworld::DOMAIN;
use pddl_engine::llm::{HttpChatClient, Provider, Retrying};
use pddl_engine::mcp::McpServer;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (provider, var, model) = match args.first().map(String::as_str) {
        Some("openai") => (Provider::OpenAi, "OPENAI_API_KEY", args.get(1).cloned().unwrap_or("gpt-4o-mini".into())),
        _ => (
            Provider::Anthropic,
            "ANTHROPIC_API_KEY",
            args.get(1).cloned().unwrap_or("claude-haiku-4-5".into()),
        ),
    };
    if std::env::var(var).is_err() {
        eprintln!("set {var} to run this example");
        std::process::exit(2);
    }
    let client = || HttpChatClient::from_env(provider, None, model.clone(), var).map(Retrying::new);
    let task = PlanningTask::from_text("sussman", DOMAIN, include_str!("../data/blocksworld/sussman.pddl"));
    let budget = Duration::from_secs(120);

    let mut direct = DirectAdapter::new(Box::new(client()?));
    let mut agentic = AgenticAdapter::new(Box::new(client()?), Box::new(McpServer::new()));
    let planners: [(&str, &mut dyn Planner); 2] = [("direct", &mut direct), ("agentic", &mut agentic)];
    for (name, planner) in planners {
        match planner.solve(&task, budget) {
            Ok(out) => println!(
                "{name}: {} plan {:?} tokens {} in / {} out, {} attempts, {:.1}s",
                out.status.as_str(),
                out.plan_length(),
                out.tokens_in,
                out.tokens_out,
                out.attempts,
                out.wall_time
            ),
            Err(e) => println!("{name}: {e}"),
        }
    }
    Ok(())
}
