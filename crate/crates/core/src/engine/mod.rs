//! Interactive planning sessions.
//!
//! An [`Engine`] holds named sessions in memory. Each session owns a grounded
//! [`Task`], its current [`State`] and the history of applied actions. Calls on
//! one session are serialised by a per-session lock; distinct sessions never
//! contend beyond the registry lookup.

mod task;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use serde::Serialize;

use crate::pddl::{parse_domain, parse_problem, ActionSignature, GroundAtom, GroundLiteral, ParseError};
use crate::validator::{validate_task, ValidationReport};

pub use task::{goal_satisfied, AtomId, State, Task};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("unknown action {0}: not a ground action of this problem")]
    UnknownAction(ActionSignature),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("problem is for domain `{got}` but the domain is `{expected}`")]
    IncompatiblePair { expected: String, got: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// PDDL source given inline or as a file path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Text(String),
    Path(PathBuf),
}

impl Source {
    /// Treat the string as PDDL text when it starts with `(` or `;`, otherwise as a path.
    pub fn infer(s: &str) -> Self {
        let t = s.trim_start();
        if t.starts_with('(') || t.starts_with(';') {
            Source::Text(s.to_string())
        } else {
            Source::Path(PathBuf::from(s))
        }
    }

    pub fn load(&self) -> Result<String, EngineError> {
        match self {
            Source::Text(t) => Ok(t.clone()),
            Source::Path(p) => std::fs::read_to_string(p).map_err(|e| EngineError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            }),
        }
    }
}

/// Parse and ground a domain/problem pair.
pub fn load_task(domain: &Source, problem: &Source) -> Result<Task, EngineError> {
    let domain = parse_domain(&domain.load()?)?;
    let problem = parse_problem(&problem.load()?, &domain).map_err(|e| match e {
        ParseError::DomainMismatch { expected, got } => EngineError::IncompatiblePair { expected, got },
        other => other.into(),
    })?;
    Ok(Task::new(domain, problem))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub object_count: usize,
    pub init_atom_count: usize,
    pub goal_literal_count: usize,
    pub ground_action_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateView {
    pub atoms: Vec<GroundAtom>,
    pub goal_reached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepResult {
    pub applied: bool,
    pub state: Vec<GroundAtom>,
    pub goal_reached: bool,
    pub message: String,
    /// Failed precondition literals when `applied` is false.
    pub unsatisfied: Vec<GroundLiteral>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub action: ActionSignature,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    task: Arc<Task>,
    current: State,
    history: Vec<usize>,
    goal_reached: bool,
    failed_attempts: usize,
}

impl Session {
    pub fn new(id: String, task: Arc<Task>) -> Self {
        let current = task.init().clone();
        let goal_reached = task.goal_satisfied(&current);
        Session {
            id,
            task,
            current,
            history: Vec::new(),
            goal_reached,
            failed_attempts: 0,
        }
    }

    pub fn task(&self) -> &Arc<Task> {
        &self.task
    }

    pub fn current(&self) -> &State {
        &self.current
    }

    pub fn goal_reached(&self) -> bool {
        self.goal_reached
    }

    /// Execution attempts that were rejected as inapplicable.
    pub fn failed_attempts(&self) -> usize {
        self.failed_attempts
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.id.clone(),
            object_count: self.task.problem.all_objects(&self.task.domain).count(),
            init_atom_count: self.task.problem.init.len(),
            goal_literal_count: self.task.problem.goal.len(),
            ground_action_count: self.task.actions().len(),
        }
    }

    pub fn state_view(&self) -> StateView {
        StateView {
            atoms: self.task.atoms_of(&self.current),
            goal_reached: self.goal_reached,
        }
    }

    pub fn applicable_actions(&self) -> Vec<ActionSignature> {
        self.task
            .applicable(&self.current)
            .map(|i| self.task.actions()[i].signature.clone())
            .collect()
    }

    pub fn execute(&mut self, signature: &ActionSignature) -> Result<StepResult, EngineError> {
        let idx = self
            .task
            .action_index(signature)
            .ok_or_else(|| EngineError::UnknownAction(signature.clone()))?;
        let unsatisfied = self.task.unsatisfied(&self.current, idx);
        if !unsatisfied.is_empty() {
            self.failed_attempts += 1;
            let listed: Vec<String> = unsatisfied.iter().map(ToString::to_string).collect();
            return Ok(StepResult {
                applied: false,
                state: self.task.atoms_of(&self.current),
                goal_reached: self.goal_reached,
                message: format!(
                    "{signature} is not applicable; unsatisfied preconditions: {}",
                    listed.join(" ")
                ),
                unsatisfied,
            });
        }
        self.current = self.task.apply(&self.current, idx);
        self.history.push(idx);
        self.goal_reached = self.task.goal_satisfied(&self.current);
        let message = if self.goal_reached {
            format!("applied {signature} (step {}); goal reached", self.history.len())
        } else {
            format!("applied {signature} (step {})", self.history.len())
        };
        Ok(StepResult {
            applied: true,
            state: self.task.atoms_of(&self.current),
            goal_reached: self.goal_reached,
            message,
            unsatisfied: Vec::new(),
        })
    }

    pub fn reset(&mut self) -> StateView {
        self.current = self.task.init().clone();
        self.history.clear();
        self.goal_reached = self.task.goal_satisfied(&self.current);
        self.state_view()
    }

    pub fn history(&self) -> Vec<HistoryEntry> {
        self.history
            .iter()
            .enumerate()
            .map(|(i, &a)| HistoryEntry {
                step: i + 1,
                action: self.task.actions()[a].signature.clone(),
            })
            .collect()
    }

    pub fn plan(&self) -> Vec<ActionSignature> {
        self.history
            .iter()
            .map(|&a| self.task.actions()[a].signature.clone())
            .collect()
    }

    /// Replaying the history from the initial state reproduces the current
    /// state, and the goal flag matches it.
    pub fn invariants_hold(&self) -> bool {
        let replayed = self
            .history
            .iter()
            .fold(self.task.init().clone(), |s, &a| self.task.apply(&s, a));
        replayed == self.current && self.goal_reached == self.task.goal_satisfied(&self.current)
    }
}

/// Registry of live sessions.
#[derive(Debug, Default)]
pub struct Engine {
    sessions: Mutex<BTreeMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Load, parse and ground a new session. Ids are assigned as
    /// `session-1`, `session-2`, ... unless `id` is given; reusing an id
    /// replaces that session.
    pub fn initialise_session(
        &self,
        domain: &Source,
        problem: &Source,
        id: Option<&str>,
    ) -> Result<SessionSummary, EngineError> {
        let task = Arc::new(load_task(domain, problem)?);
        let id = match id {
            Some(id) => id.to_string(),
            None => format!("session-{}", self.next_id.fetch_add(1, Ordering::SeqCst) + 1),
        };
        let session = Session::new(id.clone(), task);
        let summary = session.summary();
        lock(&self.sessions).insert(id, Arc::new(Mutex::new(session)));
        Ok(summary)
    }

    pub fn session_ids(&self) -> Vec<String> {
        lock(&self.sessions).keys().cloned().collect()
    }

    pub fn close_session(&self, id: &str) -> bool {
        lock(&self.sessions).remove(id).is_some()
    }

    /// Run `f` with exclusive access to one session.
    pub fn with_session<R>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> R,
    ) -> Result<R, EngineError> {
        let session = lock(&self.sessions)
            .get(id)
            .cloned()
            .ok_or_else(|| EngineError::UnknownSession(id.to_string()))?;
        let mut guard = lock(&session);
        Ok(f(&mut guard))
    }

    pub fn query_current_state(&self, id: &str) -> Result<StateView, EngineError> {
        self.with_session(id, |s| s.state_view())
    }

    pub fn query_applicable_actions(&self, id: &str) -> Result<Vec<ActionSignature>, EngineError> {
        self.with_session(id, |s| s.applicable_actions())
    }

    pub fn execute_single_action(
        &self,
        id: &str,
        action: &ActionSignature,
    ) -> Result<StepResult, EngineError> {
        self.with_session(id, |s| s.execute(action))?
    }

    pub fn reset_to_initial_state(&self, id: &str) -> Result<StateView, EngineError> {
        self.with_session(id, |s| s.reset())
    }

    pub fn query_action_history(&self, id: &str) -> Result<Vec<HistoryEntry>, EngineError> {
        self.with_session(id, |s| s.history())
    }

    /// Validate a plan against the session's problem without touching its state.
    pub fn validate_complete_plan(
        &self,
        id: &str,
        plan: &[ActionSignature],
    ) -> Result<ValidationReport, EngineError> {
        let task = self.with_session(id, |s| s.task.clone())?;
        validate_task(&task, plan)
    }
}
