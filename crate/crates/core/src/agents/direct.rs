//! Generate, validate, retry. Each attempt starts from a fresh context; the
//! model never sees why the previous plan failed.

use std::time::{Duration, Instant};

use super::{fill, plan_is_valid, AdapterFault, Outcome, Planner, PlanningTask, Prompts, Status};
use crate::llm::{ChatClient, ChatMessage, ChatRequest, LlmError, UsageStats};
use crate::pddl::ActionSignature;

pub const DEFAULT_TEMPERATURE: f64 = 0.2;

pub struct DirectAdapter {
    client: Box<dyn ChatClient>,
    temperature: f64,
    prompts: Prompts,
}

impl DirectAdapter {
    pub fn new(client: Box<dyn ChatClient>) -> Self {
        DirectAdapter {
            client,
            temperature: DEFAULT_TEMPERATURE,
            prompts: Prompts::default(),
        }
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_prompts(mut self, prompts: Prompts) -> Self {
        self.prompts = prompts;
        self
    }
}

/// Pull a plan out of a model reply. The first fenced block whose lines all
/// parse as actions wins; without fences, lines starting with `(` are used.
/// Leading list numbering such as `1.` is tolerated.
pub fn extract_plan(reply: &str) -> Option<Vec<ActionSignature>> {
    let parse_lines = |lines: &[&str]| -> Option<Vec<ActionSignature>> {
        lines
            .iter()
            .map(|l| strip_numbering(l.trim()))
            .filter(|l| !l.is_empty() && !l.starts_with(';'))
            .map(|l| l.parse().ok())
            .collect()
    };

    let lines: Vec<&str> = reply.lines().collect();
    let mut fences = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with("```"))
        .map(|(i, _)| i);
    let mut saw_block = false;
    while let (Some(open), Some(close)) = (fences.next(), fences.next()) {
        saw_block = true;
        if let Some(plan) = parse_lines(&lines[open + 1..close]) {
            return Some(plan);
        }
    }
    if saw_block {
        return None;
    }
    let bare: Vec<&str> = lines
        .iter()
        .copied()
        .filter(|l| strip_numbering(l.trim()).starts_with('('))
        .collect();
    if bare.is_empty() {
        None
    } else {
        parse_lines(&bare)
    }
}

fn strip_numbering(line: &str) -> &str {
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(r) = rest.strip_prefix(['.', ':', ')']) {
            return r.trim_start();
        }
    }
    line
}

impl Planner for DirectAdapter {
    fn solve(&mut self, task: &PlanningTask, budget: Duration) -> Result<Outcome, AdapterFault> {
        assert!(!budget.is_zero(), "budget must be positive");
        let started = Instant::now();
        let deadline = started + budget;
        let grounded = task.task()?;
        let request = ChatRequest {
            messages: vec![
                ChatMessage::system(self.prompts.direct_system.clone()),
                ChatMessage::user(fill(
                    &self.prompts.direct_user,
                    &[("domain", &task.domain_text), ("problem", &task.problem_text)],
                )),
            ],
            tools: Vec::new(),
            temperature: Some(self.temperature),
        };

        let mut usage = UsageStats::default();
        let mut attempts = 0;
        let status_plan = loop {
            if Instant::now() >= deadline {
                break (Status::Timeout, None);
            }
            match self.client.complete(&request, deadline) {
                Ok(resp) => {
                    attempts += 1;
                    usage += resp.usage;
                    match extract_plan(&resp.message.content) {
                        Some(plan) if plan_is_valid(&grounded, &plan) => break (Status::Solved, Some(plan)),
                        _ => log::debug!("{}: attempt {attempts} rejected", task.name),
                    }
                }
                Err(LlmError::BudgetExceeded) => break (Status::Timeout, None),
                // A transient failure that reached here consumed no tokens; try again.
                Err(LlmError::Transient(msg)) => {
                    log::debug!("{}: transient failure: {msg}", task.name);
                    std::thread::sleep(Duration::from_millis(10));
                }
                Err(e) => return Err(AdapterFault::Llm(e)),
            }
        };
        let mut out = Outcome::new(status_plan.0, status_plan.1, started).with_usage(usage);
        out.attempts = attempts;
        Ok(out)
    }
}
