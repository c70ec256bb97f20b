//! Newline-delimited JSON-RPC 2.0 server for the MCP `initialize`,
//! `tools/list` and `tools/call` methods.
//!
//! Protocol violations become JSON-RPC errors. Failures inside a tool
//! (unknown session, parse errors, unknown actions) are returned as normal
//! tool results with `isError: true` so a model sees them as observations.

use std::io::{self, BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use super::tools::*;
use super::ToolResult;
use crate::engine::{Engine, EngineError, Source};
use crate::pddl::ActionSignature;

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;

pub const SUPPORTED_PROTOCOL_VERSIONS: [&str; 3] = ["2024-11-05", "2025-03-26", "2025-06-18"];
pub const LATEST_PROTOCOL_VERSION: &str = "2025-06-18";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpcError {
    pub code: i64,
    pub message: String,
}

impl RpcError {
    fn new(code: i64, message: impl Into<String>) -> Self {
        RpcError {
            code,
            message: message.into(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialiseArgs {
    domain: String,
    problem: String,
    session_id: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionArgs {
    session_id: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExecuteArgs {
    action: String,
    session_id: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidateArgs {
    plan: Vec<String>,
    session_id: Option<String>,
}

fn args<T: DeserializeOwned>(tool: &str, value: Value) -> Result<T, RpcError> {
    serde_json::from_value(value)
        .map_err(|e| RpcError::new(INVALID_PARAMS, format!("invalid arguments for {tool}: {e}")))
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

/// An in-band failure reported to the caller as a tool result.
struct ToolFailure(String);

impl From<EngineError> for ToolFailure {
    fn from(e: EngineError) -> Self {
        ToolFailure(e.to_string())
    }
}

#[derive(Debug, Default)]
pub struct McpServer {
    engine: Engine,
}

impl McpServer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn resolve_session(&self, requested: Option<String>) -> Result<String, ToolFailure> {
        if let Some(id) = requested {
            return Ok(id);
        }
        let mut ids = self.engine.session_ids();
        match ids.len() {
            1 => Ok(ids.remove(0)),
            0 => Err(ToolFailure(
                "no session exists; call initialise_session first".into(),
            )),
            n => Err(ToolFailure(format!(
                "{n} sessions exist; pass session_id (one of: {})",
                ids.join(", ")
            ))),
        }
    }

    /// Dispatch one tool call. Argument shape errors are protocol errors;
    /// everything else is reported in-band.
    pub fn call_tool(&self, name: &str, arguments: Value) -> Result<ToolResult, RpcError> {
        let arguments = if arguments.is_null() { json!({}) } else { arguments };
        let outcome = match name {
            INITIALISE_SESSION => {
                let a: InitialiseArgs = args(name, arguments)?;
                self.initialise(a)
            }
            QUERY_CURRENT_STATE | RESET_TO_INITIAL_STATE => {
                let a: SessionArgs = args(name, arguments)?;
                self.state_tool(name, a)
            }
            QUERY_APPLICABLE_ACTIONS => {
                let a: SessionArgs = args(name, arguments)?;
                self.applicable(a)
            }
            EXECUTE_SINGLE_ACTION => {
                let a: ExecuteArgs = args(name, arguments)?;
                self.execute(a)
            }
            QUERY_ACTION_HISTORY => {
                let a: SessionArgs = args(name, arguments)?;
                self.history(a)
            }
            VALIDATE_COMPLETE_PLAN => {
                let a: ValidateArgs = args(name, arguments)?;
                self.validate(a)
            }
            other => return Err(RpcError::new(INVALID_PARAMS, format!("unknown tool `{other}`"))),
        };
        Ok(match outcome {
            Ok(value) => ToolResult::success(value),
            Err(ToolFailure(msg)) => ToolResult::failure(msg),
        })
    }

    fn initialise(&self, a: InitialiseArgs) -> Result<Value, ToolFailure> {
        let summary = self.engine.initialise_session(
            &Source::infer(&a.domain),
            &Source::infer(&a.problem),
            a.session_id.as_deref(),
        )?;
        Ok(serde_json::to_value(summary).expect("summary serialises"))
    }

    fn state_tool(&self, name: &str, a: SessionArgs) -> Result<Value, ToolFailure> {
        let id = self.resolve_session(a.session_id)?;
        let view = if name == RESET_TO_INITIAL_STATE {
            self.engine.reset_to_initial_state(&id)?
        } else {
            self.engine.query_current_state(&id)?
        };
        Ok(json!({
            "session_id": id,
            "atoms": strings(&view.atoms),
            "goal_reached": view.goal_reached,
        }))
    }

    fn applicable(&self, a: SessionArgs) -> Result<Value, ToolFailure> {
        let id = self.resolve_session(a.session_id)?;
        let actions = self.engine.query_applicable_actions(&id)?;
        Ok(json!({ "session_id": id, "actions": strings(&actions) }))
    }

    fn execute(&self, a: ExecuteArgs) -> Result<Value, ToolFailure> {
        let id = self.resolve_session(a.session_id)?;
        let action: ActionSignature = a
            .action
            .parse()
            .map_err(|e| ToolFailure(format!("cannot parse action `{}`: {e}", a.action)))?;
        let step = self.engine.execute_single_action(&id, &action)?;
        Ok(json!({
            "session_id": id,
            "applied": step.applied,
            "goal_reached": step.goal_reached,
            "state": strings(&step.state),
            "message": step.message,
            "unsatisfied": strings(&step.unsatisfied),
        }))
    }

    fn history(&self, a: SessionArgs) -> Result<Value, ToolFailure> {
        let id = self.resolve_session(a.session_id)?;
        let history: Vec<Value> = self
            .engine
            .query_action_history(&id)?
            .into_iter()
            .map(|h| json!({ "step": h.step, "action": h.action.to_string() }))
            .collect();
        Ok(json!({ "session_id": id, "history": history }))
    }

    fn validate(&self, a: ValidateArgs) -> Result<Value, ToolFailure> {
        let id = self.resolve_session(a.session_id)?;
        let plan = a
            .plan
            .iter()
            .map(|s| {
                s.parse::<ActionSignature>()
                    .map_err(|e| ToolFailure(format!("cannot parse action `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let report = self.engine.validate_complete_plan(&id, &plan)?;
        let failing = report.failing_step.as_ref().map(|f| {
            json!({
                "step": f.step,
                "action": f.action.to_string(),
                "unsatisfied": strings(&f.unsatisfied),
            })
        });
        Ok(json!({
            "valid": report.valid,
            "plan_length": report.plan_length,
            "steps_applied": report.steps_applied,
            "goal_satisfied": report.goal_satisfied,
            "failing_step": failing,
            "final_state": strings(&report.final_state),
            "message": report.message(),
        }))
    }

    fn dispatch(&self, method: &str, params: Value) -> Result<Value, RpcError> {
        match method {
            "initialize" => {
                let requested = params.get("protocolVersion").and_then(Value::as_str);
                let version = requested
                    .filter(|v| SUPPORTED_PROTOCOL_VERSIONS.contains(v))
                    .unwrap_or(LATEST_PROTOCOL_VERSION);
                Ok(json!({
                    "protocolVersion": version,
                    "capabilities": { "tools": { "listChanged": false } },
                    "serverInfo": { "name": "pddl-engine", "version": env!("CARGO_PKG_VERSION") },
                }))
            }
            "ping" => Ok(json!({})),
            "tools/list" => Ok(json!({ "tools": describe_tools() })),
            "tools/call" => {
                let name = params
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| RpcError::new(INVALID_PARAMS, "tools/call requires a string `name`"))?;
                let arguments = params.get("arguments").cloned().unwrap_or(Value::Null);
                if !(arguments.is_object() || arguments.is_null()) {
                    return Err(RpcError::new(INVALID_PARAMS, "`arguments` must be an object"));
                }
                Ok(self.call_tool(name, arguments)?.to_json())
            }
            other => Err(RpcError::new(METHOD_NOT_FOUND, format!("method not found: {other}"))),
        }
    }

    /// Handle one incoming line. Returns the response line, or `None` for
    /// notifications.
    pub fn handle_message(&self, line: &str) -> Option<String> {
        let response = match serde_json::from_str::<Value>(line) {
            Err(e) => error_response(Value::Null, RpcError::new(PARSE_ERROR, format!("parse error: {e}"))),
            Ok(msg) => {
                let id = msg.get("id").cloned();
                let method = msg.get("method").and_then(Value::as_str);
                let valid_id = matches!(id, None | Some(Value::Number(_) | Value::String(_) | Value::Null));
                match (msg.get("jsonrpc").and_then(Value::as_str), method) {
                    (Some("2.0"), Some(method)) if valid_id => {
                        let params = msg.get("params").cloned().unwrap_or(Value::Null);
                        let result = self.dispatch(method, params);
                        let id = id?;
                        match result {
                            Ok(result) => json!({ "jsonrpc": "2.0", "id": id, "result": result }),
                            Err(e) => error_response(id, e),
                        }
                    }
                    _ => error_response(
                        id.filter(|_| valid_id).unwrap_or(Value::Null),
                        RpcError::new(INVALID_REQUEST, "invalid request"),
                    ),
                }
            }
        };
        Some(serde_json::to_string(&response).expect("json serialises"))
    }

    /// Serve requests line by line until `input` closes.
    pub fn serve<R: BufRead, W: Write>(&self, input: R, mut output: W) -> io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(response) = self.handle_message(&line) {
                output.write_all(response.as_bytes())?;
                output.write_all(b"\n")?;
                output.flush()?;
            }
        }
        Ok(())
    }
}

fn error_response(id: Value, e: RpcError) -> Value {
    json!({
        "jsonrpc": "2.0",
        "id": id,
        "error": { "code": e.code, "message": e.message },
    })
}
