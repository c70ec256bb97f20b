//! An interactive STRIPS/PDDL simulation engine.
//!
//! The engine loads a domain/problem pair, grounds it eagerly and lets a
//! caller step through the transition system one action at a time. The
//! seven session operations are exposed as Model Context Protocol tools
//! ([`mcp`]) so that an LLM can act as the search policy. Around that core
//! sit reference planners ([`oracle`]), planner adapters for classical,
//! direct-LLM and agentic-LLM approaches ([`agents`]) and a benchmark
//! harness with the metric pipeline ([`bench`]).
//!
//! Runnable walkthroughs live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run --example interactive_session
//! cargo run --example mcp_scripted_agent
//! ```

pub mod agents;
pub mod bench;
pub mod blocksworld;
pub mod cli;
pub mod config;
pub mod engine;
pub mod grounding;
pub mod llm;
pub mod mcp;
pub mod oracle;
pub mod pddl;
pub mod validator;

pub use engine::{Engine, EngineError, Session, Source, State, Task};
pub use grounding::{ground, GroundAction};
pub use oracle::{solve_greedy, solve_optimal, SearchResult};
pub use pddl::{parse_domain, parse_plan, parse_problem, serialize_plan, ActionSignature, Domain, Problem};
pub use validator::{validate_plan, validate_task, ValidationReport};
