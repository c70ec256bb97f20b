//! Planner adapters behind one interface: an external classical planner,
//! the direct LLM loop, the agentic tool loop and the built-in oracles.
//!
//! Every adapter returns an [`Outcome`]. A `Solved` outcome always carries a
//! plan that passed [`validate_task`](crate::validator::validate_task)
//! inside the adapter.

mod agentic;
mod direct;
mod external;
mod oracle;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::engine::{EngineError, Source, Task};
use crate::llm::{LlmError, UsageStats};
use crate::mcp::McpError;
use crate::pddl::ActionSignature;
use crate::validator::validate_task;

pub use agentic::AgenticAdapter;
pub use direct::{extract_plan, DirectAdapter, DEFAULT_TEMPERATURE};
pub use external::ExternalAdapter;
pub use oracle::{looping_policy, oracle_policy, unsolvable_policy, OracleAdapter, SearchMode};

/// Marker the agentic prompt asks the model to use when it gives up.
pub const UNSOLVABLE_SENTINEL: &str = "UNSOLVABLE:";

/// A domain/problem pair, kept as text; paths are remembered when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningTask {
    pub name: String,
    pub domain_text: String,
    pub problem_text: String,
    pub domain_path: Option<PathBuf>,
    pub problem_path: Option<PathBuf>,
}

impl PlanningTask {
    pub fn from_text(name: impl Into<String>, domain: impl Into<String>, problem: impl Into<String>) -> Self {
        PlanningTask {
            name: name.into(),
            domain_text: domain.into(),
            problem_text: problem.into(),
            domain_path: None,
            problem_path: None,
        }
    }

    pub fn from_files(domain: &Path, problem: &Path) -> Result<Self, EngineError> {
        let read = |p: &Path| {
            fs::read_to_string(p).map_err(|e| EngineError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        };
        let name = problem
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| problem.display().to_string());
        Ok(PlanningTask {
            name,
            domain_text: read(domain)?,
            problem_text: read(problem)?,
            domain_path: Some(domain.to_path_buf()),
            problem_path: Some(problem.to_path_buf()),
        })
    }

    /// Parse and ground.
    pub fn task(&self) -> Result<Task, EngineError> {
        crate::engine::load_task(
            &Source::Text(self.domain_text.clone()),
            &Source::Text(self.problem_text.clone()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    Timeout,
    EarlyExit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
            Status::EarlyExit => "early_exit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub status: Status,
    pub plan: Option<Vec<ActionSignature>>,
    /// Seconds.
    pub wall_time: f64,
    pub tokens_in: u64,
    pub tokens_out: u64,
    /// At least one call's usage was estimated from character counts.
    pub tokens_estimated: bool,
    pub attempts: u32,
    pub failed_action_attempts: u32,
}

impl Outcome {
    fn new(status: Status, plan: Option<Vec<ActionSignature>>, started: Instant) -> Self {
        Outcome {
            status,
            plan,
            wall_time: started.elapsed().as_secs_f64(),
            tokens_in: 0,
            tokens_out: 0,
            tokens_estimated: false,
            attempts: 0,
            failed_action_attempts: 0,
        }
    }

    fn with_usage(mut self, usage: UsageStats) -> Self {
        self.tokens_in = usage.input_tokens;
        self.tokens_out = usage.output_tokens;
        self.tokens_estimated = usage.estimated;
        self
    }

    pub fn plan_length(&self) -> Option<usize> {
        self.plan.as_ref().map(Vec::len)
    }
}

/// Failures that are not planning outcomes; the harness records them as
/// `harness_error`.
#[derive(Debug, thiserror::Error)]
pub enum AdapterFault {
    #[error("llm transport: {0}")]
    Llm(LlmError),
    #[error("engine: {0}")]
    Engine(#[from] EngineError),
    #[error("tool endpoint: {0}")]
    Mcp(#[from] McpError),
    #[error("planner produced an unusable plan: {0}")]
    BadPlan(String),
    #[error("planner process: {0}")]
    Process(#[from] io::Error),
}

pub trait Planner: Send {
    fn solve(&mut self, task: &PlanningTask, budget: Duration) -> Result<Outcome, AdapterFault>;
}

/// True when `plan` is accepted by the validator on `task`. Unknown actions
/// count as invalid.
pub(crate) fn plan_is_valid(task: &Task, plan: &[ActionSignature]) -> bool {
    validate_task(task, plan).map(|r| r.valid).unwrap_or(false)
}

/// Prompt texts. Built-in defaults can be overridden from a directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompts {
    pub direct_system: String,
    pub direct_user: String,
    pub agentic_system: String,
    pub agentic_user: String,
    pub agentic_nudge: String,
}

impl Default for Prompts {
    fn default() -> Self {
        Prompts {
            direct_system: include_str!("../../assets/prompts/direct_system.txt").into(),
            direct_user: include_str!("../../assets/prompts/direct_user.txt").into(),
            agentic_system: include_str!("../../assets/prompts/agentic_system.txt").into(),
            agentic_user: include_str!("../../assets/prompts/agentic_user.txt").into(),
            agentic_nudge: include_str!("../../assets/prompts/agentic_nudge.txt").into(),
        }
    }
}

impl Prompts {
    /// Defaults, replaced by any `<field>.txt` found in `dir`.
    pub fn load_dir(dir: &Path) -> io::Result<Self> {
        let mut p = Prompts::default();
        for (file, slot) in [
            ("direct_system.txt", &mut p.direct_system),
            ("direct_user.txt", &mut p.direct_user),
            ("agentic_system.txt", &mut p.agentic_system),
            ("agentic_user.txt", &mut p.agentic_user),
            ("agentic_nudge.txt", &mut p.agentic_nudge),
        ] {
            let path = dir.join(file);
            if path.exists() {
                *slot = fs::read_to_string(path)?;
            }
        }
        Ok(p)
    }
}

pub(crate) fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    vars.iter()
        .fold(template.to_string(), |acc, (k, v)| acc.replace(&format!("{{{k}}}"), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prompt_override_from_dir() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("direct_user.txt"), "P={problem}").unwrap();
        let p = Prompts::load_dir(dir.path()).unwrap();
        assert_eq!(p.direct_user, "P={problem}");
        assert_eq!(p.agentic_system, Prompts::default().agentic_system);
        assert_eq!(fill(&p.direct_user, &[("problem", "x")]), "P=x");
    }

    #[test]
    fn default_prompts_mention_contract() {
        let p = Prompts::default();
        assert!(p.agentic_system.contains(UNSOLVABLE_SENTINEL));
        assert!(p.direct_user.contains("{domain}") && p.direct_user.contains("{problem}"));
        assert!(p.agentic_user.contains("{session_id}"));
    }

    #[test]
    fn status_serialises_snake_case() {
        assert_eq!(serde_json::to_string(&Status::EarlyExit).unwrap(), "\"early_exit\"");
    }
}
