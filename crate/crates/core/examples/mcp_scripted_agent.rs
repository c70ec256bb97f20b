//! Drive the MCP server the way an agent would, over JSON-RPC lines, and
//! print the transcript.
//!
//! By default the server runs in-process. Pass the path of a built
//! `pddl-engine` binary to talk to `pddl-engine serve` over stdio instead:
//!
//! cargo run --example mcp_scripted_agent -- target/debug/pddl-engine

use pddl_engine::blocksworld::DOMAIN;
use pddl_engine::mcp::tools::*;
use pddl_engine::mcp::{ChildTransport, LineTransport, McpClient, McpServer, ToolEndpoint};
use serde_json::json;

fn drive<T: LineTransport>(client: &mut McpClient<T>) -> Result<(), Box<dyn std::error::Error>> {
    let info = client.initialize()?;
    println!("server {} speaking {}", info["serverInfo"]["name"], info["protocolVersion"]);
    let tools = client.list_tools()?;
    println!("{} tools: {}", tools.len(), tools.iter().map(|t| t.name.as_str()).collect::<Vec<_>>().join(", "));

    client.call_tool(
        INITIALISE_SESSION,
        json!({ "domain": DOMAIN, "problem": include_str!("../data/blocksworld/two-blocks.pddl") }),
    )?;
    // Greedy policy: take the first applicable action that is not undoing the last one.
    let mut last: Option<String> = None;
    for _ in 0..10 {
        let listed = client.call_tool(QUERY_APPLICABLE_ACTIONS, json!({}))?;
        let actions = listed.structured.as_ref().and_then(|s| s["actions"].as_array().cloned()).unwrap_or_default();
        let pick = actions
            .iter()
            .filter_map(|a| a.as_str())
            .find(|a| last.as_deref().is_none_or(|l| !undoes(l, a)))
            .ok_or("stuck")?
            .to_string();
        let step = client.call_tool(EXECUTE_SINGLE_ACTION, json!({ "action": pick }))?;
        let goal = step.structured.as_ref().is_some_and(|s| s["goal_reached"] == true);
        println!("{pick} -> goal {goal}");
        last = Some(pick);
        if goal {
            break;
        }
    }
    let history = client.call_tool(QUERY_ACTION_HISTORY, json!({}))?;
    let plan: Vec<String> = history.structured.as_ref().map_or(Vec::new(), |h| {
        h["history"].as_array().unwrap().iter().map(|e| e["action"].as_str().unwrap().to_string()).collect()
    });
    let verdict = client.call_tool(VALIDATE_COMPLETE_PLAN, json!({ "plan": plan }))?;
    println!("validation: {}", verdict.text());
    Ok(())
}

fn undoes(previous: &str, next: &str) -> bool {
    let name = |s: &str| s.trim_matches(['(', ')']).split_whitespace().next().unwrap_or("").to_string();
    let args = |s: &str| s.trim_matches(['(', ')']).split_whitespace().skip(1).collect::<Vec<_>>().join(" ");
    let inverse = match name(previous).as_str() {
        "pick-up" => "put-down",
        "put-down" => "pick-up",
        "stack" => "unstack",
        "unstack" => "stack",
        _ => "",
    };
    name(next) == inverse && args(next) == args(previous)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let transcript = match std::env::args().nth(1) {
        Some(bin) => {
            let mut client = McpClient::new(ChildTransport::spawn(bin, &["serve"])?);
            drive(&mut client)?;
            let t = client.transcript().clone();
            client.into_transport().shutdown()?;
            t
        }
        None => {
            let mut client = McpClient::in_process();
            drive(&mut client)?;
            client.transcript().clone()
        }
    };
    println!("\ntranscript ({} lines):", transcript.lines.len());
    print!("{}", transcript.to_jsonl());

    let received: Vec<&str> = transcript.received().collect();
    let replayed = transcript.replay(&McpServer::new());
    println!("\nreplay against a fresh server identical: {}", replayed == received);
    Ok(())
}
