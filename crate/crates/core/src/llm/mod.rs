//! Provider-agnostic chat-with-tools transport.
//!
//! Adapters talk to a [`ChatClient`]. [`ScriptedClient`] replays canned
//! turns for offline runs; [`HttpChatClient`] speaks to an OpenAI-style or
//! Anthropic-style endpoint. [`Retrying`] adds exponential backoff for
//! transient failures, bounded by the caller's deadline.

mod http;
mod scripted;

use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use http::{HttpChatClient, Provider};
pub use scripted::{ScriptedClient, ScriptedTurn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub id: String,
    pub name: String,
    pub arguments: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ToolCall>,
    /// Set on `Role::Tool` messages: the call this is a result for.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
}

impl ChatMessage {
    fn plain(role: Role, content: impl Into<String>) -> Self {
        ChatMessage {
            role,
            content: content.into(),
            tool_calls: Vec::new(),
            tool_call_id: None,
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::plain(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self::plain(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::plain(Role::Assistant, content)
    }

    pub fn assistant_calls(content: impl Into<String>, calls: Vec<ToolCall>) -> Self {
        ChatMessage {
            tool_calls: calls,
            ..Self::plain(Role::Assistant, content)
        }
    }

    pub fn tool_result(call_id: impl Into<String>, content: impl Into<String>) -> Self {
        ChatMessage {
            tool_call_id: Some(call_id.into()),
            ..Self::plain(Role::Tool, content)
        }
    }

    fn char_count(&self) -> usize {
        self.content.chars().count()
            + self
                .tool_calls
                .iter()
                .map(|c| c.name.len() + c.arguments.to_string().chars().count())
                .sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub description: String,
    pub parameters: Value,
}

impl From<&crate::mcp::ToolDescriptor> for ToolSpec {
    fn from(d: &crate::mcp::ToolDescriptor) -> Self {
        ToolSpec {
            name: d.name.clone(),
            description: d.description.clone(),
            parameters: d.input_schema.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    pub tools: Vec<ToolSpec>,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageStats {
    pub input_tokens: u64,
    pub output_tokens: u64,
    /// The provider reported nothing and the counts are chars/4 estimates.
    pub estimated: bool,
}

impl UsageStats {
    pub fn total(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }

    /// Character-based estimate: one token per four characters, rounded up.
    pub fn estimate(request: &ChatRequest, reply: &ChatMessage) -> Self {
        let input: usize = request.messages.iter().map(ChatMessage::char_count).sum();
        UsageStats {
            input_tokens: input.div_ceil(4) as u64,
            output_tokens: reply.char_count().div_ceil(4) as u64,
            estimated: true,
        }
    }
}

impl std::ops::AddAssign for UsageStats {
    fn add_assign(&mut self, other: Self) {
        self.input_tokens += other.input_tokens;
        self.output_tokens += other.output_tokens;
        self.estimated |= other.estimated;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatResponse {
    pub message: ChatMessage,
    pub usage: UsageStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("transient transport failure: {0}")]
    Transient(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("deadline reached before the model replied")]
    BudgetExceeded,
    #[error("scripted client has no response left for this request")]
    ScriptExhausted,
    #[error("unexpected provider response: {0}")]
    Protocol(String),
}

pub trait ChatClient: Send {
    fn complete(&mut self, request: &ChatRequest, deadline: Instant) -> Result<ChatResponse, LlmError>;
}

impl<C: ChatClient + ?Sized> ChatClient for Box<C> {
    fn complete(&mut self, request: &ChatRequest, deadline: Instant) -> Result<ChatResponse, LlmError> {
        (**self).complete(request, deadline)
    }
}

/// Retries [`LlmError::Transient`] with exponential backoff until the deadline.
pub struct Retrying<C> {
    inner: C,
    initial_backoff: Duration,
    max_backoff: Duration,
    retries: usize,
}

impl<C: ChatClient> Retrying<C> {
    pub fn new(inner: C) -> Self {
        Self::with_backoff(inner, Duration::from_millis(500), Duration::from_secs(8))
    }

    pub fn with_backoff(inner: C, initial: Duration, max: Duration) -> Self {
        Retrying {
            inner,
            initial_backoff: initial,
            max_backoff: max,
            retries: 0,
        }
    }

    /// Number of retries performed so far.
    pub fn retries(&self) -> usize {
        self.retries
    }

    pub fn into_inner(self) -> C {
        self.inner
    }
}

impl<C: ChatClient> ChatClient for Retrying<C> {
    fn complete(&mut self, request: &ChatRequest, deadline: Instant) -> Result<ChatResponse, LlmError> {
        let mut backoff = self.initial_backoff;
        loop {
            if Instant::now() >= deadline {
                return Err(LlmError::BudgetExceeded);
            }
            match self.inner.complete(request, deadline) {
                Err(LlmError::Transient(msg)) => {
                    let now = Instant::now();
                    if now + backoff >= deadline {
                        log::warn!("giving up after transient failure: {msg}");
                        return Err(LlmError::BudgetExceeded);
                    }
                    log::debug!("transient failure, retrying in {backoff:?}: {msg}");
                    thread::sleep(backoff);
                    self.retries += 1;
                    backoff = (backoff * 2).min(self.max_backoff);
                }
                other => return other,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_rounds_up() {
        let req = ChatRequest {
            messages: vec![ChatMessage::user("abcde")],
            ..Default::default()
        };
        let u = UsageStats::estimate(&req, &ChatMessage::assistant("abc"));
        assert_eq!((u.input_tokens, u.output_tokens, u.estimated), (2, 1, true));
    }

    #[test]
    fn retry_recovers_and_counts_only_completed_calls() {
        let script = ScriptedClient::new(vec![
            ScriptedTurn::Fail(LlmError::Transient("503".into())),
            ScriptedTurn::Fail(LlmError::Transient("503".into())),
            ScriptedTurn::text("ok").with_usage(10, 2),
        ]);
        let mut c = Retrying::with_backoff(script, Duration::from_millis(1), Duration::from_millis(4));
        let req = ChatRequest {
            messages: vec![ChatMessage::user("hi")],
            ..Default::default()
        };
        let r = c.complete(&req, Instant::now() + Duration::from_secs(5)).unwrap();
        assert_eq!(r.message.content, "ok");
        assert_eq!(r.usage, UsageStats { input_tokens: 10, output_tokens: 2, estimated: false });
        assert_eq!(c.retries(), 2);
    }

    #[test]
    fn retry_stops_at_deadline() {
        let script = ScriptedClient::from_fn(|_| Err(LlmError::Transient("down".into())));
        let mut c = Retrying::with_backoff(script, Duration::from_millis(20), Duration::from_millis(40));
        let req = ChatRequest {
            messages: vec![ChatMessage::user("hi")],
            ..Default::default()
        };
        let start = Instant::now();
        let r = c.complete(&req, start + Duration::from_millis(150));
        assert_eq!(r, Err(LlmError::BudgetExceeded));
        assert!(start.elapsed() < Duration::from_millis(400));
    }

    #[test]
    fn auth_errors_are_not_retried() {
        let script = ScriptedClient::new(vec![ScriptedTurn::Fail(LlmError::Auth("401".into()))]);
        let mut c = Retrying::new(script);
        let req = ChatRequest {
            messages: vec![ChatMessage::user("hi")],
            ..Default::default()
        };
        let r = c.complete(&req, Instant::now() + Duration::from_secs(5));
        assert!(matches!(r, Err(LlmError::Auth(_))));
        assert_eq!(c.retries(), 0);
    }
}
