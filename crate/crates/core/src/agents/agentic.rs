//! The model drives the simulator through the seven tools, one call at a
//! time, with every tool result appended to its context.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{fill, plan_is_valid, AdapterFault, Outcome, Planner, PlanningTask, Prompts, Status, UNSOLVABLE_SENTINEL};
use crate::llm::{ChatClient, ChatMessage, ChatRequest, LlmError, ToolCall, ToolSpec, UsageStats};
use crate::mcp::tools::*;
use crate::mcp::{McpError, ToolEndpoint, ToolResult};
use crate::pddl::ActionSignature;

pub struct AgenticAdapter {
    client: Box<dyn ChatClient>,
    endpoint: Box<dyn ToolEndpoint + Send>,
    prompts: Prompts,
}

impl AgenticAdapter {
    pub fn new(client: Box<dyn ChatClient>, endpoint: Box<dyn ToolEndpoint + Send>) -> Self {
        AgenticAdapter {
            client,
            endpoint,
            prompts: Prompts::default(),
        }
    }

    pub fn with_prompts(mut self, prompts: Prompts) -> Self {
        self.prompts = prompts;
        self
    }

    fn history_plan(&mut self, session: &str) -> Result<Vec<ActionSignature>, AdapterFault> {
        let r = self
            .endpoint
            .call_tool(QUERY_ACTION_HISTORY, json!({ "session_id": session }))?;
        let entries = r
            .structured
            .as_ref()
            .and_then(|v| v["history"].as_array().cloned())
            .ok_or_else(|| AdapterFault::BadPlan(format!("history query failed: {}", r.text())))?;
        entries
            .iter()
            .map(|e| {
                e["action"]
                    .as_str()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| AdapterFault::BadPlan(format!("bad history entry {e}")))
            })
            .collect()
    }
}

/// What a single tool call did, as far as termination is concerned.
enum CallEffect {
    None,
    FailedAction,
    Reset,
    Validated,
}

fn classify(name: &str, result: &ToolResult) -> CallEffect {
    let s = result.structured.as_ref();
    match name {
        EXECUTE_SINGLE_ACTION if result.is_error || s.is_some_and(|v| v["applied"] == false) => CallEffect::FailedAction,
        RESET_TO_INITIAL_STATE if !result.is_error => CallEffect::Reset,
        VALIDATE_COMPLETE_PLAN if s.is_some_and(|v| v["valid"] == true) => CallEffect::Validated,
        _ => CallEffect::None,
    }
}

impl Planner for AgenticAdapter {
    fn solve(&mut self, task: &PlanningTask, budget: Duration) -> Result<Outcome, AdapterFault> {
        assert!(!budget.is_zero(), "budget must be positive");
        let started = Instant::now();
        let deadline = started + budget;
        let grounded = task.task()?;

        let init = self.endpoint.call_tool(
            INITIALISE_SESSION,
            json!({ "domain": task.domain_text, "problem": task.problem_text }),
        )?;
        let mut session = init
            .structured
            .as_ref()
            .and_then(|v| v["session_id"].as_str())
            .map(str::to_string)
            .ok_or_else(|| AdapterFault::BadPlan(format!("session could not be opened: {}", init.text())))?;
        let tools: Vec<ToolSpec> = self.endpoint.list_tools()?.iter().map(ToolSpec::from).collect();

        let mut request = ChatRequest {
            messages: vec![
                ChatMessage::system(self.prompts.agentic_system.clone()),
                ChatMessage::user(fill(
                    &self.prompts.agentic_user,
                    &[
                        ("session_id", &session),
                        ("domain", &task.domain_text),
                        ("problem", &task.problem_text),
                    ],
                )),
            ],
            tools,
            temperature: None,
        };

        let mut usage = UsageStats::default();
        let mut attempts = 1;
        let mut failed_actions = 0;
        let finish = |status, plan, usage, attempts, failed| {
            let mut out = Outcome::new(status, plan, started).with_usage(usage);
            out.attempts = attempts;
            out.failed_action_attempts = failed;
            Ok(out)
        };

        loop {
            if Instant::now() >= deadline {
                return finish(Status::Timeout, None, usage, attempts, failed_actions);
            }
            let reply = match self.client.complete(&request, deadline) {
                Ok(r) => r,
                Err(LlmError::BudgetExceeded) => return finish(Status::Timeout, None, usage, attempts, failed_actions),
                Err(LlmError::Transient(msg)) => {
                    log::debug!("{}: transient failure: {msg}", task.name);
                    std::thread::sleep(Duration::from_millis(10));
                    continue;
                }
                Err(e) => return Err(AdapterFault::Llm(e)),
            };
            usage += reply.usage;
            let message = reply.message;
            let calls = message.tool_calls.clone();
            let text = message.content.trim().to_string();
            request.messages.push(message);

            if calls.is_empty() {
                if text.starts_with(UNSOLVABLE_SENTINEL) {
                    return finish(Status::EarlyExit, None, usage, attempts, failed_actions);
                }
                request.messages.push(ChatMessage::user(self.prompts.agentic_nudge.clone()));
                continue;
            }

            let mut validated = false;
            for call in calls {
                if Instant::now() >= deadline {
                    return finish(Status::Timeout, None, usage, attempts, failed_actions);
                }
                let (content, effect) = self.run_call(&call, &mut session)?;
                match effect {
                    CallEffect::FailedAction => failed_actions += 1,
                    CallEffect::Reset => attempts += 1,
                    CallEffect::Validated => validated = true,
                    CallEffect::None => {}
                }
                request.messages.push(ChatMessage::tool_result(call.id, content));
            }

            if validated {
                let plan = self.history_plan(&session)?;
                if plan_is_valid(&grounded, &plan) {
                    return finish(Status::Solved, Some(plan), usage, attempts, failed_actions);
                }
                request.messages.push(ChatMessage::user(
                    "That plan is valid but differs from the actions executed in the session. \
                     Execute the plan in the session, then validate it again.",
                ));
            }
        }
    }
}

impl AgenticAdapter {
    /// Execute one model tool call. Malformed calls become in-band error text.
    fn run_call(&mut self, call: &ToolCall, session: &mut String) -> Result<(String, CallEffect), AdapterFault> {
        if !TOOL_NAMES.contains(&call.name.as_str()) {
            return Ok((
                format!("error: unknown tool `{}`; available tools: {}", call.name, TOOL_NAMES.join(", ")),
                CallEffect::None,
            ));
        }
        let mut args = match &call.arguments {
            Value::Object(m) => m.clone(),
            Value::Null => Default::default(),
            other => {
                return Ok((
                    format!("error: arguments for `{}` must be a JSON object, got {other}", call.name),
                    CallEffect::None,
                ))
            }
        };
        if call.name != INITIALISE_SESSION {
            args.entry("session_id").or_insert_with(|| json!(session.clone()));
        }
        match self.endpoint.call_tool(&call.name, Value::Object(args)) {
            Ok(result) => {
                if call.name == INITIALISE_SESSION {
                    if let Some(id) = result.structured.as_ref().and_then(|v| v["session_id"].as_str()) {
                        *session = id.to_string();
                    }
                }
                let effect = classify(&call.name, &result);
                let prefix = if result.is_error { "error: " } else { "" };
                Ok((format!("{prefix}{}", result.text()), effect))
            }
            Err(McpError::Rpc { message, .. }) => Ok((format!("error: {message}"), CallEffect::None)),
            Err(e) => Err(e.into()),
        }
    }
}
