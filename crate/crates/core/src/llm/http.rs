//! HTTPS transport with one request/response translation layer per provider.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ChatClient, ChatMessage, ChatRequest, ChatResponse, LlmError, Role, ToolCall, UsageStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    /// `POST {endpoint}` with a chat-completions body and bearer auth.
    OpenAi,
    /// `POST {endpoint}` with a messages body and `x-api-key` auth.
    Anthropic,
}

impl Provider {
    pub fn default_endpoint(self) -> &'static str {
        match self {
            Provider::OpenAi => "https://api.openai.com/v1/chat/completions",
            Provider::Anthropic => "https://api.anthropic.com/v1/messages",
        }
    }

    pub fn encode(self, model: &str, max_tokens: u32, req: &ChatRequest) -> Value {
        match self {
            Provider::OpenAi => openai::encode(model, max_tokens, req),
            Provider::Anthropic => anthropic::encode(model, max_tokens, req),
        }
    }

    pub fn decode(self, body: &Value) -> Result<(ChatMessage, Option<UsageStats>), LlmError> {
        match self {
            Provider::OpenAi => openai::decode(body),
            Provider::Anthropic => anthropic::decode(body),
        }
    }
}

pub struct HttpChatClient {
    provider: Provider,
    endpoint: String,
    model: String,
    api_key: String,
    max_tokens: u32,
}

impl HttpChatClient {
    pub fn new(provider: Provider, endpoint: Option<String>, model: String, api_key: String) -> Self {
        HttpChatClient {
            provider,
            endpoint: endpoint.unwrap_or_else(|| provider.default_endpoint().to_string()),
            model,
            api_key,
            max_tokens: 8192,
        }
    }

    pub fn with_max_tokens(mut self, n: u32) -> Self {
        self.max_tokens = n;
        self
    }

    /// Read the key from `var`; a missing variable is an auth error.
    pub fn from_env(provider: Provider, endpoint: Option<String>, model: String, var: &str) -> Result<Self, LlmError> {
        let key = std::env::var(var).map_err(|_| LlmError::Auth(format!("environment variable {var} is not set")))?;
        Ok(Self::new(provider, endpoint, model, key))
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&mut self, request: &ChatRequest, deadline: Instant) -> Result<ChatResponse, LlmError> {
        let remaining = deadline.saturating_duration_since(Instant::now());
        if remaining < Duration::from_millis(10) {
            return Err(LlmError::BudgetExceeded);
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(remaining))
            .http_status_as_error(false)
            .build()
            .into();
        let body = self.provider.encode(&self.model, self.max_tokens, request);
        let req = agent.post(&self.endpoint).header("content-type", "application/json");
        let req = match self.provider {
            Provider::OpenAi => req.header("authorization", format!("Bearer {}", self.api_key)),
            Provider::Anthropic => req
                .header("x-api-key", self.api_key.as_str())
                .header("anthropic-version", "2023-06-01"),
        };
        let mut resp = match req.send_json(&body) {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) if Instant::now() >= deadline => return Err(LlmError::BudgetExceeded),
            Err(e) => return Err(LlmError::Transient(e.to_string())),
        };
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| LlmError::Transient(e.to_string()))?;
        match status {
            200..=299 => {}
            401 | 403 => return Err(LlmError::Auth(format!("HTTP {status}: {text}"))),
            408 | 409 | 429 | 500..=599 => return Err(LlmError::Transient(format!("HTTP {status}: {text}"))),
            _ => return Err(LlmError::Protocol(format!("HTTP {status}: {text}"))),
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| LlmError::Protocol(e.to_string()))?;
        let (message, usage) = self.provider.decode(&value)?;
        let usage = usage.unwrap_or_else(|| UsageStats::estimate(request, &message));
        Ok(ChatResponse { message, usage })
    }
}

fn count(v: &Value) -> Option<u64> {
    v.as_u64()
}

mod openai {
    use super::*;

    pub fn encode(model: &str, max_tokens: u32, req: &ChatRequest) -> Value {
        let messages: Vec<Value> = req
            .messages
            .iter()
            .map(|m| {
                let role = match m.role {
                    Role::System => "system",
                    Role::User => "user",
                    Role::Assistant => "assistant",
                    Role::Tool => "tool",
                };
                let mut v = json!({ "role": role, "content": m.content });
                if !m.tool_calls.is_empty() {
                    v["tool_calls"] = m
                        .tool_calls
                        .iter()
                        .map(|c| {
                            json!({
                                "id": c.id,
                                "type": "function",
                                "function": { "name": c.name, "arguments": c.arguments.to_string() },
                            })
                        })
                        .collect();
                }
                if let Some(id) = &m.tool_call_id {
                    v["tool_call_id"] = json!(id);
                }
                v
            })
            .collect();
        let mut body = json!({ "model": model, "messages": messages, "max_tokens": max_tokens });
        if !req.tools.is_empty() {
            body["tools"] = req
                .tools
                .iter()
                .map(|t| {
                    json!({
                        "type": "function",
                        "function": { "name": t.name, "description": t.description, "parameters": t.parameters },
                    })
                })
                .collect();
        }
        if let Some(t) = req.temperature {
            body["temperature"] = json!(t);
        }
        body
    }

    pub fn decode(body: &Value) -> Result<(ChatMessage, Option<UsageStats>), LlmError> {
        let msg = &body["choices"][0]["message"];
        if !msg.is_object() {
            return Err(LlmError::Protocol(format!("no choices[0].message in {body}")));
        }
        let content = msg["content"].as_str().unwrap_or("").to_string();
        let calls = msg["tool_calls"]
            .as_array()
            .map(|calls| {
                calls
                    .iter()
                    .map(|c| {
                        let raw = c["function"]["arguments"].as_str().unwrap_or("{}");
                        // Unparsable arguments are passed through as a string so
                        // the adapter can report them back to the model.
                        let arguments = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()));
                        ToolCall {
                            id: c["id"].as_str().unwrap_or("").to_string(),
                            name: c["function"]["name"].as_str().unwrap_or("").to_string(),
                            arguments,
                        }
                    })
                    .collect()
            })
            .unwrap_or_default();
        let usage = match (count(&body["usage"]["prompt_tokens"]), count(&body["usage"]["completion_tokens"])) {
            (Some(i), Some(o)) => Some(UsageStats {
                input_tokens: i,
                output_tokens: o,
                estimated: false,
            }),
            _ => None,
        };
        Ok((ChatMessage::assistant_calls(content, calls), usage))
    }
}

mod anthropic {
    use super::*;

    pub fn encode(model: &str, max_tokens: u32, req: &ChatRequest) -> Value {
        let system: Vec<&str> = req
            .messages
            .iter()
            .filter(|m| m.role == Role::System)
            .map(|m| m.content.as_str())
            .collect();
        let mut messages: Vec<Value> = Vec::new();
        for m in req.messages.iter().filter(|m| m.role != Role::System) {
            let (role, blocks) = match m.role {
                Role::Tool => (
                    "user",
                    vec![json!({
                        "type": "tool_result",
                        "tool_use_id": m.tool_call_id.clone().unwrap_or_default(),
                        "content": m.content,
                    })],
                ),
                Role::Assistant => {
                    let mut blocks = Vec::new();
                    if !m.content.is_empty() {
                        blocks.push(json!({ "type": "text", "text": m.content }));
                    }
                    for c in &m.tool_calls {
                        blocks.push(json!({ "type": "tool_use", "id": c.id, "name": c.name, "input": c.arguments }));
                    }
                    ("assistant", blocks)
                }
                _ => ("user", vec![json!({ "type": "text", "text": m.content })]),
            };
            // Consecutive same-role turns (e.g. several tool results) merge into one message.
            match messages.last_mut() {
                Some(last) if last["role"] == role => {
                    last["content"].as_array_mut().expect("content array").extend(blocks)
                }
                _ => messages.push(json!({ "role": role, "content": blocks })),
            }
        }
        let mut body = json!({ "model": model, "max_tokens": max_tokens, "messages": messages });
        if !system.is_empty() {
            body["system"] = json!(system.join("\n\n"));
        }
        if !req.tools.is_empty() {
            body["tools"] = req
                .tools
                .iter()
                .map(|t| json!({ "name": t.name, "description": t.description, "input_schema": t.parameters }))
                .collect();
        }
        if let Some(t) = req.temperature {
            body["temperature"] = json!(t);
        }
        body
    }

    pub fn decode(body: &Value) -> Result<(ChatMessage, Option<UsageStats>), LlmError> {
        let blocks = body["content"]
            .as_array()
            .ok_or_else(|| LlmError::Protocol(format!("no content array in {body}")))?;
        let mut text = Vec::new();
        let mut calls = Vec::new();
        for b in blocks {
            match b["type"].as_str() {
                Some("text") => text.push(b["text"].as_str().unwrap_or("")),
                Some("tool_use") => calls.push(ToolCall {
                    id: b["id"].as_str().unwrap_or("").to_string(),
                    name: b["name"].as_str().unwrap_or("").to_string(),
                    arguments: b["input"].clone(),
                }),
                _ => {}
            }
        }
        let usage = match (count(&body["usage"]["input_tokens"]), count(&body["usage"]["output_tokens"])) {
            (Some(i), Some(o)) => Some(UsageStats {
                input_tokens: i,
                output_tokens: o,
                estimated: false,
            }),
            _ => None,
        };
        Ok((ChatMessage::assistant_calls(text.join("\n"), calls), usage))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::ToolSpec;

    fn request() -> ChatRequest {
        ChatRequest {
            messages: vec![
                ChatMessage::system("sys"),
                ChatMessage::user("go"),
                ChatMessage::assistant_calls(
                    "",
                    vec![
                        ToolCall { id: "t1".into(), name: "query_current_state".into(), arguments: json!({}) },
                        ToolCall { id: "t2".into(), name: "query_action_history".into(), arguments: json!({}) },
                    ],
                ),
                ChatMessage::tool_result("t1", "state"),
                ChatMessage::tool_result("t2", "history"),
            ],
            tools: vec![ToolSpec {
                name: "query_current_state".into(),
                description: "d".into(),
                parameters: json!({ "type": "object" }),
            }],
            temperature: Some(0.2),
        }
    }

    #[test]
    fn openai_encoding() {
        let body = Provider::OpenAi.encode("m", 100, &request());
        assert_eq!(body["messages"].as_array().unwrap().len(), 5);
        assert_eq!(body["messages"][2]["tool_calls"][0]["function"]["arguments"], "{}");
        assert_eq!(body["messages"][3]["tool_call_id"], "t1");
        assert_eq!(body["tools"][0]["function"]["name"], "query_current_state");
        assert_eq!(body["temperature"], 0.2);
    }

    #[test]
    fn anthropic_encoding_merges_tool_results() {
        let body = Provider::Anthropic.encode("m", 100, &request());
        assert_eq!(body["system"], "sys");
        let msgs = body["messages"].as_array().unwrap();
        assert_eq!(msgs.len(), 3);
        assert_eq!(msgs[1]["content"][1]["type"], "tool_use");
        assert_eq!(msgs[2]["content"].as_array().unwrap().len(), 2);
        assert_eq!(msgs[2]["content"][1]["tool_use_id"], "t2");
        assert_eq!(body["tools"][0]["input_schema"]["type"], "object");
    }

    #[test]
    fn openai_decoding() {
        let body = json!({
            "choices": [{ "message": { "role": "assistant", "content": null, "tool_calls": [
                { "id": "c", "type": "function", "function": { "name": "execute_single_action", "arguments": "{\"action\":\"(pick-up a)\"}" } }
            ]}}],
            "usage": { "prompt_tokens": 120, "completion_tokens": 7 }
        });
        let (m, u) = Provider::OpenAi.decode(&body).unwrap();
        assert_eq!(m.tool_calls[0].arguments, json!({ "action": "(pick-up a)" }));
        assert_eq!(u, Some(UsageStats { input_tokens: 120, output_tokens: 7, estimated: false }));
    }

    #[test]
    fn anthropic_decoding_without_usage() {
        let body = json!({ "content": [
            { "type": "text", "text": "thinking" },
            { "type": "tool_use", "id": "x", "name": "query_current_state", "input": {} }
        ]});
        let (m, u) = Provider::Anthropic.decode(&body).unwrap();
        assert_eq!(m.content, "thinking");
        assert_eq!(m.tool_calls.len(), 1);
        assert_eq!(u, None);
        assert!(Provider::Anthropic.decode(&json!({ "error": {} })).is_err());
    }

    #[test]
    fn missing_key_is_auth_error() {
        let r = HttpChatClient::from_env(Provider::OpenAi, None, "m".into(), "PDDL_ENGINE_SURELY_UNSET_KEY");
        assert!(matches!(r, Err(LlmError::Auth(_))));
    }
}
