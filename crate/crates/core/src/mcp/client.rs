//! JSON-RPC client for the engine's MCP server, over an in-process server
//! or a child process speaking newline-delimited JSON on stdio.

use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::server::{McpServer, LATEST_PROTOCOL_VERSION};
use super::{ToolDescriptor, ToolEndpoint, ToolResult};

#[derive(Debug, thiserror::Error)]
pub enum McpError {
    #[error("transport error: {0}")]
    Io(#[from] io::Error),
    #[error("server closed the connection")]
    Closed,
    #[error("json-rpc error {code}: {message}")]
    Rpc { code: i64, message: String },
    #[error("malformed response: {0}")]
    Protocol(String),
}

/// A bidirectional line channel.
pub trait LineTransport {
    fn send(&mut self, line: &str) -> io::Result<()>;
    /// Next line from the peer, `None` at end of stream.
    fn recv(&mut self) -> io::Result<Option<String>>;
}

/// Feeds lines straight into an owned [`McpServer`].
#[derive(Debug, Default)]
pub struct InProcessTransport {
    server: McpServer,
    pending: std::collections::VecDeque<String>,
}

impl InProcessTransport {
    pub fn new(server: McpServer) -> Self {
        InProcessTransport {
            server,
            pending: Default::default(),
        }
    }

    pub fn server(&self) -> &McpServer {
        &self.server
    }
}

impl LineTransport for InProcessTransport {
    fn send(&mut self, line: &str) -> io::Result<()> {
        if let Some(resp) = self.server.handle_message(line) {
            self.pending.push_back(resp);
        }
        Ok(())
    }

    fn recv(&mut self) -> io::Result<Option<String>> {
        Ok(self.pending.pop_front())
    }
}

/// A server running as a child process. The child is killed on drop.
#[derive(Debug)]
pub struct ChildTransport {
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl ChildTransport {
    pub fn spawn(program: impl AsRef<Path>, args: &[&str]) -> io::Result<Self> {
        let mut child = Command::new(program.as_ref())
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ChildTransport { child, stdin, stdout })
    }

    /// Close stdin and wait for the child to exit.
    pub fn shutdown(mut self) -> io::Result<std::process::ExitStatus> {
        self.stdin.take();
        self.child.wait()
    }
}

impl LineTransport for ChildTransport {
    fn send(&mut self, line: &str) -> io::Result<()> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| io::Error::new(io::ErrorKind::BrokenPipe, "stdin closed"))?;
        stdin.write_all(line.as_bytes())?;
        stdin.write_all(b"\n")?;
        stdin.flush()
    }

    fn recv(&mut self) -> io::Result<Option<String>> {
        let mut line = String::new();
        if self.stdout.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        Ok(Some(line.trim_end_matches(['\r', '\n']).to_string()))
    }
}

impl Drop for ChildTransport {
    fn drop(&mut self) {
        if let Ok(None) = self.child.try_wait() {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Sent,
    Received,
}

/// Every line exchanged by a client, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub lines: Vec<(Direction, String)>,
}

impl Transcript {
    pub fn sent(&self) -> impl Iterator<Item = &str> {
        self.lines
            .iter()
            .filter(|(d, _)| *d == Direction::Sent)
            .map(|(_, l)| l.as_str())
    }

    pub fn received(&self) -> impl Iterator<Item = &str> {
        self.lines
            .iter()
            .filter(|(d, _)| *d == Direction::Received)
            .map(|(_, l)| l.as_str())
    }

    /// Feed the sent lines to `server` and collect its responses.
    pub fn replay(&self, server: &McpServer) -> Vec<String> {
        self.sent().filter_map(|l| server.handle_message(l)).collect()
    }

    /// One JSON object per line: `{"dir":"sent","line":...}`.
    pub fn to_jsonl(&self) -> String {
        self.lines
            .iter()
            .map(|(d, l)| format!("{}\n", json!({ "dir": d, "line": l })))
            .collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        #[derive(Deserialize)]
        struct Row {
            dir: Direction,
            line: String,
        }
        let lines = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str::<Row>(l).map(|r| (r.dir, r.line)))
            .collect::<Result<_, _>>()?;
        Ok(Transcript { lines })
    }
}

pub struct McpClient<T: LineTransport> {
    transport: T,
    next_id: u64,
    transcript: Transcript,
}

impl McpClient<InProcessTransport> {
    pub fn in_process() -> Self {
        McpClient::new(InProcessTransport::default())
    }
}

impl<T: LineTransport> McpClient<T> {
    pub fn new(transport: T) -> Self {
        McpClient {
            transport,
            next_id: 1,
            transcript: Transcript::default(),
        }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    pub fn into_transport(self) -> T {
        self.transport
    }

    fn send(&mut self, msg: &Value) -> Result<(), McpError> {
        let line = msg.to_string();
        self.transport.send(&line)?;
        self.transcript.lines.push((Direction::Sent, line));
        Ok(())
    }

    pub fn request(&mut self, method: &str, params: Value) -> Result<Value, McpError> {
        let id = self.next_id;
        self.next_id += 1;
        self.send(&json!({ "jsonrpc": "2.0", "id": id, "method": method, "params": params }))?;
        let line = self.transport.recv()?.ok_or(McpError::Closed)?;
        self.transcript.lines.push((Direction::Received, line.clone()));
        let msg: Value = serde_json::from_str(&line).map_err(|e| McpError::Protocol(e.to_string()))?;
        if msg.get("id") != Some(&json!(id)) {
            return Err(McpError::Protocol(format!("expected response to id {id}: {line}")));
        }
        if let Some(err) = msg.get("error") {
            return Err(McpError::Rpc {
                code: err.get("code").and_then(Value::as_i64).unwrap_or(0),
                message: err.get("message").and_then(Value::as_str).unwrap_or("").to_string(),
            });
        }
        msg.get("result")
            .cloned()
            .ok_or_else(|| McpError::Protocol(format!("no result: {line}")))
    }

    pub fn notify(&mut self, method: &str) -> Result<(), McpError> {
        self.send(&json!({ "jsonrpc": "2.0", "method": method }))
    }

    /// The `initialize` handshake followed by `notifications/initialized`.
    pub fn initialize(&mut self) -> Result<Value, McpError> {
        let result = self.request(
            "initialize",
            json!({
                "protocolVersion": LATEST_PROTOCOL_VERSION,
                "capabilities": {},
                "clientInfo": { "name": "pddl-engine-client", "version": env!("CARGO_PKG_VERSION") },
            }),
        )?;
        self.notify("notifications/initialized")?;
        Ok(result)
    }
}

impl<T: LineTransport> ToolEndpoint for McpClient<T> {
    fn list_tools(&mut self) -> Result<Vec<ToolDescriptor>, McpError> {
        let result = self.request("tools/list", json!({}))?;
        serde_json::from_value(result.get("tools").cloned().unwrap_or(Value::Null))
            .map_err(|e| McpError::Protocol(e.to_string()))
    }

    fn call_tool(&mut self, name: &str, arguments: Value) -> Result<ToolResult, McpError> {
        let result = self.request("tools/call", json!({ "name": name, "arguments": arguments }))?;
        serde_json::from_value(result).map_err(|e| McpError::Protocol(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcp::tools::*;

    #[test]
    fn in_process_round_trip_and_replay() {
        let mut c = McpClient::in_process();
        c.initialize().unwrap();
        assert_eq!(c.list_tools().unwrap().len(), 7);
        let r = c
            .call_tool(
                INITIALISE_SESSION,
                json!({
                    "domain": crate::blocksworld::DOMAIN,
                    "problem": include_str!("../../data/blocksworld/two-blocks.pddl"),
                }),
            )
            .unwrap();
        assert!(!r.is_error);
        for a in ["(pick-up a)", "(stack a b)"] {
            let r = c.call_tool(EXECUTE_SINGLE_ACTION, json!({ "action": a })).unwrap();
            assert_eq!(r.structured.as_ref().unwrap()["applied"], true);
        }
        let r = c.call_tool(QUERY_CURRENT_STATE, json!({})).unwrap();
        assert_eq!(r.structured.unwrap()["goal_reached"], true);
        let err = c.call_tool(EXECUTE_SINGLE_ACTION, json!({})).unwrap_err();
        assert!(matches!(err, McpError::Rpc { code: -32602, .. }));

        let t = c.transcript().clone();
        let replayed = t.replay(&McpServer::new());
        assert_eq!(replayed, t.received().map(str::to_string).collect::<Vec<_>>());
        assert_eq!(Transcript::from_jsonl(&t.to_jsonl()).unwrap(), t);
    }
}
