//! A classical planner run as a subprocess.
//!
//! The command template is split on whitespace and `{domain}`, `{problem}`
//! and `{plan_out}` are substituted in each word; no shell is involved.
//! Anytime planners that write `plan_out.1`, `plan_out.2`, ... are
//! supported: the highest-numbered complete plan is taken.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{AdapterFault, Outcome, Planner, PlanningTask, Status};
use crate::pddl::{parse_plan, ActionSignature};
use crate::validator::validate_task;

#[derive(Debug, Clone)]
pub struct ExternalAdapter {
    template: String,
    poll: Duration,
}

impl ExternalAdapter {
    pub fn new(template: impl Into<String>) -> Self {
        ExternalAdapter {
            template: template.into(),
            poll: Duration::from_millis(20),
        }
    }

    pub fn command_line(&self, domain: &Path, problem: &Path, plan_out: &Path) -> Vec<String> {
        self.template
            .split_whitespace()
            .map(|w| {
                w.replace("{domain}", &domain.to_string_lossy())
                    .replace("{problem}", &problem.to_string_lossy())
                    .replace("{plan_out}", &plan_out.to_string_lossy())
            })
            .collect()
    }
}

/// Plan files written next to `plan_out`, oldest first: `plan_out` itself,
/// then `plan_out.N` by increasing N.
fn plan_files(plan_out: &Path) -> Vec<PathBuf> {
    let mut numbered: Vec<(u64, PathBuf)> = Vec::new();
    let dir = plan_out.parent().unwrap_or(Path::new("."));
    let stem = plan_out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if let Ok(entries) = fs::read_dir(dir) {
        for e in entries.flatten() {
            let name = e.file_name().to_string_lossy().into_owned();
            if let Some(n) = name.strip_prefix(&format!("{stem}.")).and_then(|s| s.parse().ok()) {
                numbered.push((n, e.path()));
            }
        }
    }
    numbered.sort();
    let mut files: Vec<PathBuf> = plan_out.exists().then(|| plan_out.to_path_buf()).into_iter().collect();
    files.extend(numbered.into_iter().map(|(_, p)| p));
    files
}

fn absolute(p: &Path) -> PathBuf {
    fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}

impl Planner for ExternalAdapter {
    fn solve(&mut self, task: &PlanningTask, budget: Duration) -> Result<Outcome, AdapterFault> {
        assert!(!budget.is_zero(), "budget must be positive");
        let started = Instant::now();
        let deadline = started + budget;
        let grounded = task.task()?;
        let work = tempfile::tempdir()?;

        let domain = match &task.domain_path {
            Some(p) => absolute(p),
            None => {
                let p = work.path().join("domain.pddl");
                fs::write(&p, &task.domain_text)?;
                p
            }
        };
        let problem = match &task.problem_path {
            Some(p) => absolute(p),
            None => {
                let p = work.path().join("problem.pddl");
                fs::write(&p, &task.problem_text)?;
                p
            }
        };
        let plan_out = work.path().join("plan");
        let argv = self.command_line(&domain, &problem, &plan_out);
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| AdapterFault::BadPlan("empty planner command".into()))?;

        let mut child = Command::new(program)
            .args(args)
            .current_dir(work.path())
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()?;
        let killed = loop {
            if child.try_wait()?.is_some() {
                break false;
            }
            if Instant::now() >= deadline {
                let _ = child.kill();
                let _ = child.wait();
                break true;
            }
            thread::sleep(self.poll.min(deadline.saturating_duration_since(Instant::now())));
        };

        let files = plan_files(&plan_out);
        let mut chosen: Option<Vec<ActionSignature>> = None;
        for (i, path) in files.iter().enumerate().rev() {
            let text = fs::read_to_string(path)?;
            match parse_plan(&text) {
                Ok(plan) => {
                    chosen = Some(plan);
                    break;
                }
                // A planner killed mid-write may leave its newest file truncated.
                Err(_) if killed && i + 1 == files.len() => continue,
                Err(e) => return Err(AdapterFault::BadPlan(format!("{}: {e}", path.display()))),
            }
        }

        let mut out = match chosen {
            None => Outcome::new(Status::Timeout, None, started),
            Some(plan) => {
                let report = validate_task(&grounded, &plan).map_err(|e| AdapterFault::BadPlan(e.to_string()))?;
                if !report.valid {
                    return Err(AdapterFault::BadPlan(report.message()));
                }
                Outcome::new(Status::Solved, Some(plan), started)
            }
        };
        out.attempts = 1;
        Ok(out)
    }
}
