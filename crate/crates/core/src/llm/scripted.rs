use std::collections::{HashMap, VecDeque};
use std::thread;
use std::time::{Duration, Instant};

use super::{ChatClient, ChatMessage, ChatRequest, ChatResponse, LlmError, ToolCall, UsageStats};

/// One canned reply.
#[derive(Debug, Clone, PartialEq)]
pub enum ScriptedTurn {
    Reply {
        message: ChatMessage,
        usage: Option<UsageStats>,
        delay: Duration,
    },
    Fail(LlmError),
}

impl ScriptedTurn {
    pub fn text(content: impl Into<String>) -> Self {
        ScriptedTurn::Reply {
            message: ChatMessage::assistant(content),
            usage: None,
            delay: Duration::ZERO,
        }
    }

    pub fn tool_calls(calls: Vec<ToolCall>) -> Self {
        ScriptedTurn::Reply {
            message: ChatMessage::assistant_calls("", calls),
            usage: None,
            delay: Duration::ZERO,
        }
    }

    /// Report these counts instead of the chars/4 estimate.
    pub fn with_usage(self, input: u64, output: u64) -> Self {
        match self {
            ScriptedTurn::Reply { message, delay, .. } => ScriptedTurn::Reply {
                message,
                usage: Some(UsageStats {
                    input_tokens: input,
                    output_tokens: output,
                    estimated: false,
                }),
                delay,
            },
            fail => fail,
        }
    }

    /// Simulated latency. A reply that would land after the deadline is
    /// reported as `BudgetExceeded`.
    pub fn with_delay(self, d: Duration) -> Self {
        match self {
            ScriptedTurn::Reply { message, usage, .. } => ScriptedTurn::Reply {
                message,
                usage,
                delay: d,
            },
            fail => fail,
        }
    }
}

type ScriptFn = Box<dyn FnMut(&ChatRequest) -> Result<ChatMessage, LlmError> + Send>;

enum Script {
    Sequence(VecDeque<ScriptedTurn>),
    /// Keyed by the content of the last request message.
    Keyed(HashMap<String, VecDeque<ScriptedTurn>>),
    Function(ScriptFn),
}

/// A deterministic in-memory [`ChatClient`]. Running out of script is an
/// error, never a silent empty reply.
pub struct ScriptedClient {
    script: Script,
    calls: usize,
    last_request: Option<ChatRequest>,
}

impl ScriptedClient {
    pub fn new(turns: Vec<ScriptedTurn>) -> Self {
        Self::with_script(Script::Sequence(turns.into()))
    }

    pub fn keyed(turns: impl IntoIterator<Item = (String, Vec<ScriptedTurn>)>) -> Self {
        Self::with_script(Script::Keyed(
            turns.into_iter().map(|(k, v)| (k, v.into())).collect(),
        ))
    }

    /// Replies computed from the request, e.g. a policy that reads tool results.
    pub fn from_fn(f: impl FnMut(&ChatRequest) -> Result<ChatMessage, LlmError> + Send + 'static) -> Self {
        Self::with_script(Script::Function(Box::new(f)))
    }

    fn with_script(script: Script) -> Self {
        ScriptedClient {
            script,
            calls: 0,
            last_request: None,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    /// The most recent request. Only one is kept, since long agent loops
    /// resend an ever-growing history.
    pub fn last_request(&self) -> Option<&ChatRequest> {
        self.last_request.as_ref()
    }

    fn next_turn(&mut self, request: &ChatRequest) -> Result<ScriptedTurn, LlmError> {
        match &mut self.script {
            Script::Sequence(q) => q.pop_front().ok_or(LlmError::ScriptExhausted),
            Script::Keyed(map) => {
                let key = request.messages.last().map(|m| m.content.as_str()).unwrap_or("");
                map.get_mut(key)
                    .and_then(VecDeque::pop_front)
                    .ok_or(LlmError::ScriptExhausted)
            }
            Script::Function(f) => f(request).map(|message| ScriptedTurn::Reply {
                message,
                usage: None,
                delay: Duration::ZERO,
            }),
        }
    }
}

impl ChatClient for ScriptedClient {
    fn complete(&mut self, request: &ChatRequest, deadline: Instant) -> Result<ChatResponse, LlmError> {
        assert!(!request.messages.is_empty(), "chat request without messages");
        self.calls += 1;
        self.last_request = Some(request.clone());
        match self.next_turn(request)? {
            ScriptedTurn::Fail(e) => Err(e),
            ScriptedTurn::Reply { message, usage, delay } => {
                if !delay.is_zero() {
                    let now = Instant::now();
                    if now + delay > deadline {
                        thread::sleep(deadline.saturating_duration_since(now));
                        return Err(LlmError::BudgetExceeded);
                    }
                    thread::sleep(delay);
                }
                let usage = usage.unwrap_or_else(|| UsageStats::estimate(request, &message));
                Ok(ChatResponse { message, usage })
            }
        }
    }
}
