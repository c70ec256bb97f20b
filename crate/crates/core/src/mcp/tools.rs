//! The seven engine operations as MCP tool descriptors.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const INITIALISE_SESSION: &str = "initialise_session";
pub const QUERY_CURRENT_STATE: &str = "query_current_state";
pub const QUERY_APPLICABLE_ACTIONS: &str = "query_applicable_actions";
pub const EXECUTE_SINGLE_ACTION: &str = "execute_single_action";
pub const RESET_TO_INITIAL_STATE: &str = "reset_to_initial_state";
pub const QUERY_ACTION_HISTORY: &str = "query_action_history";
pub const VALIDATE_COMPLETE_PLAN: &str = "validate_complete_plan";

/// Tool names in registration order.
pub const TOOL_NAMES: [&str; 7] = [
    INITIALISE_SESSION,
    QUERY_CURRENT_STATE,
    QUERY_APPLICABLE_ACTIONS,
    EXECUTE_SINGLE_ACTION,
    RESET_TO_INITIAL_STATE,
    QUERY_ACTION_HISTORY,
    VALIDATE_COMPLETE_PLAN,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    #[serde(rename = "inputSchema")]
    pub input_schema: Value,
    #[serde(rename = "outputSchema")]
    pub output_schema: Value,
}

fn session_id_property() -> Value {
    json!({
        "type": "string",
        "description": "Session to act on. May be omitted when exactly one session exists."
    })
}

fn string_array(description: &str) -> Value {
    json!({ "type": "array", "items": { "type": "string" }, "description": description })
}

fn object(properties: Value, required: &[&str]) -> Value {
    json!({
        "type": "object",
        "properties": properties,
        "required": required,
        "additionalProperties": false
    })
}

fn session_only_input() -> Value {
    object(json!({ "session_id": session_id_property() }), &[])
}

fn state_output() -> Value {
    object(
        json!({
            "session_id": { "type": "string" },
            "atoms": string_array("Ground atoms that are currently true, sorted; all others are false."),
            "goal_reached": { "type": "boolean" }
        }),
        &["session_id", "atoms", "goal_reached"],
    )
}

fn failing_step_schema() -> Value {
    json!({
        "oneOf": [
            { "type": "null" },
            object(
                json!({
                    "step": { "type": "integer", "minimum": 1 },
                    "action": { "type": "string" },
                    "unsatisfied": string_array("Precondition literals that did not hold.")
                }),
                &["step", "action", "unsatisfied"],
            )
        ]
    })
}

/// Descriptors for all seven tools, in registration order.
pub fn describe_tools() -> Vec<ToolDescriptor> {
    let tool = |name: &str, description: &str, input: Value, output: Value| ToolDescriptor {
        name: name.to_string(),
        description: description.to_string(),
        input_schema: input,
        output_schema: output,
    };
    vec![
        tool(
            INITIALISE_SESSION,
            "Load a PDDL domain and problem (inline text or file paths), ground all actions and \
             start a session at the initial state. Returns the session id and problem size.",
            object(
                json!({
                    "domain": { "type": "string", "description": "PDDL domain text, or a path to a domain file." },
                    "problem": { "type": "string", "description": "PDDL problem text, or a path to a problem file." },
                    "session_id": { "type": "string", "description": "Optional id; reusing an id replaces that session." }
                }),
                &["domain", "problem"],
            ),
            object(
                json!({
                    "session_id": { "type": "string" },
                    "object_count": { "type": "integer", "minimum": 0 },
                    "init_atom_count": { "type": "integer", "minimum": 0 },
                    "goal_literal_count": { "type": "integer", "minimum": 0 },
                    "ground_action_count": { "type": "integer", "minimum": 0 }
                }),
                &["session_id", "object_count", "init_atom_count", "goal_literal_count", "ground_action_count"],
            ),
        ),
        tool(
            QUERY_CURRENT_STATE,
            "Return the set of ground atoms that are currently true and whether the goal holds.",
            session_only_input(),
            state_output(),
        ),
        tool(
            QUERY_APPLICABLE_ACTIONS,
            "Return every ground action whose preconditions hold in the current state, \
             as plan-format strings such as \"(pick-up a)\".",
            session_only_input(),
            object(
                json!({
                    "session_id": { "type": "string" },
                    "actions": string_array("Applicable actions, sorted.")
                }),
                &["session_id", "actions"],
            ),
        ),
        tool(
            EXECUTE_SINGLE_ACTION,
            "Apply one ground action, e.g. \"(stack a b)\". If its preconditions hold the state \
             advances; otherwise the state is unchanged and the unsatisfied preconditions are \
             listed. Returns a success flag, the resulting state and a goal-reached flag.",
            object(
                json!({
                    "action": { "type": "string", "description": "Ground action in plan format, e.g. \"(pick-up a)\"." },
                    "session_id": session_id_property()
                }),
                &["action"],
            ),
            object(
                json!({
                    "session_id": { "type": "string" },
                    "applied": { "type": "boolean" },
                    "goal_reached": { "type": "boolean" },
                    "state": string_array("Ground atoms true after the call, sorted."),
                    "message": { "type": "string" },
                    "unsatisfied": string_array("Precondition literals that did not hold; empty when applied.")
                }),
                &["session_id", "applied", "goal_reached", "state", "message", "unsatisfied"],
            ),
        ),
        tool(
            RESET_TO_INITIAL_STATE,
            "Restore the problem's initial state and clear the action history.",
            session_only_input(),
            state_output(),
        ),
        tool(
            QUERY_ACTION_HISTORY,
            "Return the actions applied so far in this session, in order. Rejected attempts are not included.",
            session_only_input(),
            object(
                json!({
                    "session_id": { "type": "string" },
                    "history": {
                        "type": "array",
                        "items": object(
                            json!({
                                "step": { "type": "integer", "minimum": 1 },
                                "action": { "type": "string" }
                            }),
                            &["step", "action"],
                        )
                    }
                }),
                &["session_id", "history"],
            ),
        ),
        tool(
            VALIDATE_COMPLETE_PLAN,
            "Check a complete action sequence against the session's problem from its initial \
             state, without changing the session. Reports validity, the first failing step and \
             whether the final state satisfies all goal conditions.",
            object(
                json!({
                    "plan": string_array("Ground actions in order, each in plan format."),
                    "session_id": session_id_property()
                }),
                &["plan"],
            ),
            object(
                json!({
                    "valid": { "type": "boolean" },
                    "plan_length": { "type": "integer", "minimum": 0 },
                    "steps_applied": { "type": "integer", "minimum": 0 },
                    "goal_satisfied": { "type": "boolean" },
                    "failing_step": failing_step_schema(),
                    "final_state": string_array("Ground atoms true after the applied prefix."),
                    "message": { "type": "string" }
                }),
                &["valid", "plan_length", "steps_applied", "goal_satisfied", "failing_step", "final_state", "message"],
            ),
        ),
    ]
}
