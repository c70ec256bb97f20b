//! Model Context Protocol surface for the engine: tool descriptors, a
//! stdio JSON-RPC server and a matching client.

mod client;
mod server;
pub mod tools;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use client::{ChildTransport, InProcessTransport, LineTransport, McpClient, McpError, Transcript};
pub use server::{
    McpServer, RpcError, INVALID_PARAMS, INVALID_REQUEST, LATEST_PROTOCOL_VERSION, METHOD_NOT_FOUND,
    PARSE_ERROR,
};
pub use tools::{describe_tools, ToolDescriptor, TOOL_NAMES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextContent {
    #[serde(rename = "type")]
    pub kind: String,
    pub text: String,
}

/// The payload of a `tools/call` response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    pub content: Vec<TextContent>,
    #[serde(rename = "structuredContent", default, skip_serializing_if = "Option::is_none")]
    pub structured: Option<Value>,
    #[serde(rename = "isError", default)]
    pub is_error: bool,
}

impl ToolResult {
    pub fn success(value: Value) -> Self {
        ToolResult {
            content: vec![TextContent {
                kind: "text".into(),
                text: value.to_string(),
            }],
            structured: Some(value),
            is_error: false,
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        ToolResult {
            content: vec![TextContent {
                kind: "text".into(),
                text: message.into(),
            }],
            structured: None,
            is_error: true,
        }
    }

    /// All text blocks joined by newlines.
    pub fn text(&self) -> String {
        self.content.iter().map(|c| c.text.as_str()).collect::<Vec<_>>().join("\n")
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or_else(|_| json!({}))
    }
}

/// Anything that can list and call the engine tools.
pub trait ToolEndpoint {
    fn list_tools(&mut self) -> Result<Vec<ToolDescriptor>, McpError>;
    fn call_tool(&mut self, name: &str, arguments: Value) -> Result<ToolResult, McpError>;
}

impl ToolEndpoint for McpServer {
    fn list_tools(&mut self) -> Result<Vec<ToolDescriptor>, McpError> {
        Ok(describe_tools())
    }

    fn call_tool(&mut self, name: &str, arguments: Value) -> Result<ToolResult, McpError> {
        McpServer::call_tool(self, name, arguments).map_err(|e| McpError::Rpc {
            code: e.code,
            message: e.message,
        })
    }
}
