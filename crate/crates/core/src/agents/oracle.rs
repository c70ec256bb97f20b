//! Built-in planners as adapters, plus scripted chat policies for running
//! the agentic loop offline.

use std::time::{Duration, Instant};

use serde_json::json;

use super::{AdapterFault, Outcome, Planner, PlanningTask, Status, UNSOLVABLE_SENTINEL};
use crate::engine::EngineError;
use crate::llm::{ChatMessage, Role, ScriptedClient, ToolCall};
use crate::mcp::tools::*;
use crate::oracle::{solve_greedy, solve_optimal, DEFAULT_NODE_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Optimal,
    Greedy,
}

/// Runs [`solve_optimal`] or [`solve_greedy`]. Search is not interruptible;
/// the node budget bounds it instead.
#[derive(Debug, Clone, Copy)]
pub struct OracleAdapter {
    pub mode: SearchMode,
    pub node_budget: usize,
}

impl OracleAdapter {
    pub fn new(mode: SearchMode) -> Self {
        OracleAdapter {
            mode,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl Planner for OracleAdapter {
    fn solve(&mut self, task: &PlanningTask, budget: Duration) -> Result<Outcome, AdapterFault> {
        let started = Instant::now();
        let grounded = task.task()?;
        let result = match self.mode {
            SearchMode::Optimal => solve_optimal(&grounded, self.node_budget),
            SearchMode::Greedy => solve_greedy(&grounded, self.node_budget),
        };
        let mut out = match result.plan {
            Some(plan) if started.elapsed() <= budget => Outcome::new(Status::Solved, Some(plan), started),
            _ => Outcome::new(Status::Timeout, None, started),
        };
        out.attempts = 1;
        Ok(out)
    }
}

fn call(turn: usize, name: &str, arguments: serde_json::Value) -> ChatMessage {
    ChatMessage::assistant_calls(
        "",
        vec![ToolCall {
            id: format!("call-{turn}"),
            name: name.to_string(),
            arguments,
        }],
    )
}

/// An agentic chat policy that follows the optimal plan: before each step it
/// lists applicable actions and checks the planned one is among them, then
/// executes it; finally it validates the executed plan.
pub fn oracle_policy(task: &PlanningTask) -> Result<ScriptedClient, EngineError> {
    let grounded = task.task()?;
    let Some(plan) = solve_optimal(&grounded, DEFAULT_NODE_BUDGET).plan else {
        return Ok(unsolvable_policy());
    };
    let plan: Vec<String> = plan.iter().map(ToString::to_string).collect();
    Ok(ScriptedClient::from_fn(move |req| {
        let turn = req.messages.iter().filter(|m| m.role == Role::Assistant).count();
        let n = plan.len();
        Ok(if turn < 2 * n {
            let step = turn / 2;
            if turn % 2 == 0 {
                call(turn, QUERY_APPLICABLE_ACTIONS, json!({}))
            } else {
                let listed = req.messages.last().is_some_and(|m| m.content.contains(&plan[step]));
                if !listed {
                    return Ok(ChatMessage::assistant(format!(
                        "{UNSOLVABLE_SENTINEL} planned action {} is not applicable",
                        plan[step]
                    )));
                }
                call(turn, EXECUTE_SINGLE_ACTION, json!({ "action": plan[step] }))
            }
        } else if turn == 2 * n {
            call(turn, VALIDATE_COMPLETE_PLAN, json!({ "plan": plan }))
        } else {
            ChatMessage::assistant(format!("{UNSOLVABLE_SENTINEL} validation did not succeed"))
        })
    }))
}

/// A policy that declares the task unsolvable straight away.
pub fn unsolvable_policy() -> ScriptedClient {
    ScriptedClient::from_fn(|_| Ok(ChatMessage::assistant(format!("{UNSOLVABLE_SENTINEL} no plan exists"))))
}

/// A policy that queries the state forever.
pub fn looping_policy() -> ScriptedClient {
    let mut turn = 0;
    ScriptedClient::from_fn(move |_| {
        turn += 1;
        Ok(call(turn, QUERY_CURRENT_STATE, json!({})))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_adapters_on_sussman() {
        let task = PlanningTask::from_text(
            "sussman",
            crate::blocksworld::DOMAIN,
            include_str!("../../data/blocksworld/sussman.pddl"),
        );
        let out = OracleAdapter::new(SearchMode::Optimal)
            .solve(&task, Duration::from_secs(5))
            .unwrap();
        assert_eq!(out.status, Status::Solved);
        assert_eq!(out.plan_length(), Some(6));
        assert_eq!(out.tokens_in + out.tokens_out, 0);
        let g = OracleAdapter::new(SearchMode::Greedy)
            .solve(&task, Duration::from_secs(5))
            .unwrap();
        assert!(g.plan_length().unwrap() >= 6);
    }

    #[test]
    fn exhausted_search_is_timeout() {
        let task = PlanningTask::from_text(
            "sussman",
            crate::blocksworld::DOMAIN,
            include_str!("../../data/blocksworld/sussman.pddl"),
        );
        let mut a = OracleAdapter::new(SearchMode::Optimal);
        a.node_budget = 1;
        assert_eq!(a.solve(&task, Duration::from_secs(5)).unwrap().status, Status::Timeout);
    }
}
