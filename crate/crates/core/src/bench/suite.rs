//! Running every adapter on every instance under a wall-clock budget.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use super::{BenchError, RunLog, RunRecord};
use crate::agents::{AdapterFault, Outcome, Planner, PlanningTask, Status};

/// Builds a fresh planner for one run, so runs share no state.
pub type PlannerFactory = Arc<dyn Fn(&PlanningTask) -> Result<Box<dyn Planner>, AdapterFault> + Send + Sync>;

#[derive(Clone)]
pub struct NamedAdapter {
    pub name: String,
    pub factory: PlannerFactory,
}

impl NamedAdapter {
    pub fn new(
        name: impl Into<String>,
        factory: impl Fn(&PlanningTask) -> Result<Box<dyn Planner>, AdapterFault> + Send + Sync + 'static,
    ) -> Self {
        NamedAdapter {
            name: name.into(),
            factory: Arc::new(factory),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub budget: Duration,
    /// Extra time allowed before the watchdog abandons a run.
    pub grace: Duration,
    pub parallelism: usize,
    pub log_path: Option<PathBuf>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            budget: Duration::from_secs(180),
            grace: Duration::from_millis(500),
            parallelism: 1,
            log_path: None,
        }
    }
}

struct Job {
    instance: usize,
    adapter: usize,
}

/// Run one job on its own thread. If it overruns `budget + grace` the thread
/// is abandoned and a timeout is recorded with the true elapsed time.
fn run_job(task: &PlanningTask, instance: usize, adapter: &NamedAdapter, opts: &SuiteOptions) -> RunRecord {
    let started = Instant::now();
    let (tx, rx) = mpsc::channel();
    let task_owned = task.clone();
    let factory = adapter.factory.clone();
    let budget = opts.budget;
    let spawned = thread::Builder::new()
        .name(format!("run-{instance}-{}", adapter.name))
        .spawn(move || {
            let result = factory(&task_owned).and_then(|mut p| p.solve(&task_owned, budget));
            let _ = tx.send(result);
        });
    if let Err(e) = spawned {
        return RunRecord::harness_error(instance, &task.name, &adapter.name, 0.0, format!("spawn failed: {e}"));
    }
    let elapsed = || started.elapsed().as_secs_f64();
    match rx.recv_timeout(opts.budget + opts.grace) {
        Ok(Ok(outcome)) => RunRecord::from_outcome(instance, &task.name, &adapter.name, &outcome),
        Ok(Err(fault)) => RunRecord::harness_error(instance, &task.name, &adapter.name, elapsed(), fault.to_string()),
        Err(mpsc::RecvTimeoutError::Timeout) => {
            log::warn!("{} on {}: no result after the budget, abandoning run", adapter.name, task.name);
            let abandoned = Outcome {
                status: Status::Timeout,
                plan: None,
                wall_time: elapsed(),
                tokens_in: 0,
                tokens_out: 0,
                tokens_estimated: false,
                attempts: 0,
                failed_action_attempts: 0,
            };
            RunRecord::from_outcome(instance, &task.name, &adapter.name, &abandoned)
        }
        Err(mpsc::RecvTimeoutError::Disconnected) => {
            RunRecord::harness_error(instance, &task.name, &adapter.name, elapsed(), "adapter panicked".into())
        }
    }
}

/// Run every adapter on every instance. Pairs already present in the log
/// are skipped. New records are appended in (instance, adapter) order even
/// when runs finish out of order, and each is passed to `on_record` as it
/// is written. Returns the new records.
pub fn run_suite(
    instances: &[PlanningTask],
    adapters: &[NamedAdapter],
    opts: &SuiteOptions,
    mut on_record: impl FnMut(&RunRecord),
) -> Result<Vec<RunRecord>, BenchError> {
    assert!(!instances.is_empty(), "suite has no instances");
    assert!(!adapters.is_empty(), "suite has no adapters");
    assert!(!opts.budget.is_zero(), "budget must be positive");

    let (mut log, existing) = match &opts.log_path {
        Some(p) => {
            let (log, existing) = RunLog::open(p)?;
            (Some(log), existing)
        }
        None => (None, Vec::new()),
    };
    let done: HashSet<(usize, &str)> = existing.iter().map(|r| (r.instance, r.approach.as_str())).collect();
    let jobs: Vec<Job> = (0..instances.len())
        .flat_map(|instance| (0..adapters.len()).map(move |adapter| Job { instance, adapter }))
        .filter(|j| !done.contains(&(j.instance, adapters[j.adapter].name.as_str())))
        .collect();
    if jobs.len() < instances.len() * adapters.len() {
        log::info!(
            "resuming: {} of {} runs already logged",
            instances.len() * adapters.len() - jobs.len(),
            instances.len() * adapters.len()
        );
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    let mut written = Vec::with_capacity(jobs.len());
    thread::scope(|scope| -> Result<(), BenchError> {
        for _ in 0..opts.parallelism.max(1).min(jobs.len().max(1)) {
            let tx = tx.clone();
            let (jobs, next) = (&jobs, &next);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = jobs.get(k) else { break };
                let record = run_job(&instances[job.instance], job.instance, &adapters[job.adapter], opts);
                if tx.send((k, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut flushed = 0;
        for (k, record) in rx {
            pending.insert(k, record);
            while let Some(record) = pending.remove(&flushed) {
                if let Some(log) = log.as_mut() {
                    log.append(&record)?;
                }
                log::info!(
                    "{} {} {:?} {:.1}s",
                    record.approach,
                    record.name,
                    record.status,
                    record.wall_time_s
                );
                on_record(&record);
                written.push(record);
                flushed += 1;
            }
        }
        Ok(())
    })?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{OracleAdapter, SearchMode};
    use crate::bench::{read_log, RecordStatus};

    fn tasks() -> Vec<PlanningTask> {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/blocksworld/manifest.txt");
        crate::bench::load_manifest(&dir).unwrap()
    }

    fn oracle(mode: SearchMode) -> NamedAdapter {
        NamedAdapter::new(format!("{mode:?}").to_lowercase(), move |_| {
            Ok(Box::new(OracleAdapter::new(mode)) as Box<dyn Planner>)
        })
    }

    struct Sleeper(Duration);

    impl Planner for Sleeper {
        fn solve(&mut self, _: &PlanningTask, _: Duration) -> Result<Outcome, AdapterFault> {
            thread::sleep(self.0);
            Ok(Outcome {
                status: Status::Timeout,
                plan: None,
                wall_time: self.0.as_secs_f64(),
                tokens_in: 0,
                tokens_out: 0,
                tokens_estimated: false,
                attempts: 1,
                failed_action_attempts: 0,
            })
        }
    }

    #[test]
    fn grid_cardinality_and_order() {
        let tasks = tasks();
        let adapters = [oracle(SearchMode::Optimal), oracle(SearchMode::Greedy)];
        let opts = SuiteOptions {
            budget: Duration::from_secs(10),
            parallelism: 3,
            ..Default::default()
        };
        let records = run_suite(&tasks, &adapters, &opts, |_| {}).unwrap();
        assert_eq!(records.len(), tasks.len() * 2);
        let order: Vec<(usize, &str)> = records.iter().map(|r| (r.instance, r.approach.as_str())).collect();
        let mut sorted = order.clone();
        sorted.sort_by_key(|&(i, a)| (i, a != "optimal"));
        assert_eq!(order, sorted);
        let sussman = records.iter().find(|r| r.name == "sussman" && r.approach == "optimal").unwrap();
        assert_eq!(sussman.plan_length, Some(6));
    }

    #[test]
    fn resume_skips_logged_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let opts = SuiteOptions {
            budget: Duration::from_secs(10),
            log_path: Some(dir.path().join("log.jsonl")),
            ..Default::default()
        };
        let tasks = tasks();
        let first = run_suite(&tasks[..2], &[oracle(SearchMode::Optimal)], &opts, |_| {}).unwrap();
        assert_eq!(first.len(), 2);
        let second = run_suite(&tasks, &[oracle(SearchMode::Optimal)], &opts, |_| {}).unwrap();
        assert_eq!(second.len(), tasks.len() - 2);
        let all = read_log(opts.log_path.as_ref().unwrap()).unwrap();
        let mut keys: Vec<_> = all.iter().map(|r| (r.instance, r.approach.clone())).collect();
        let n = keys.len();
        keys.dedup();
        assert_eq!(keys.len(), n);
        assert_eq!(n, tasks.len());
    }

    #[test]
    fn watchdog_abandons_overrunning_runs() {
        let tasks = tasks();
        let adapters = [NamedAdapter::new("sleeper", |_| {
            Ok(Box::new(Sleeper(Duration::from_secs(30))) as Box<dyn Planner>)
        })];
        let opts = SuiteOptions {
            budget: Duration::from_millis(200),
            grace: Duration::from_millis(100),
            ..Default::default()
        };
        let start = Instant::now();
        let records = run_suite(&tasks[..1], &adapters, &opts, |_| {}).unwrap();
        assert_eq!(records[0].status, RecordStatus::Timeout);
        assert!(records[0].wall_time_s >= 0.3);
        assert!(start.elapsed() < Duration::from_secs(2));
    }

    #[test]
    fn faults_and_panics_are_harness_errors() {
        let tasks = tasks();
        let adapters = [
            NamedAdapter::new("fault", |_| Err(AdapterFault::BadPlan("nope".into()))),
            NamedAdapter::new("panic", |_| panic!("adapter bug")),
        ];
        let records = run_suite(&tasks[..1], &adapters, &SuiteOptions::default(), |_| {}).unwrap();
        assert!(records.iter().all(|r| r.status == RecordStatus::HarnessError));
        assert_eq!(records[1].error.as_deref(), Some("adapter panicked"));
    }
}
