//! Command-line front end. Exit codes: 0 success, 1 a domain-level failure
//! (bad PDDL, invalid plan, no plan found), 2 usage or I/O errors.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::agents::{
    oracle_policy, AgenticAdapter, DirectAdapter, ExternalAdapter, OracleAdapter, Planner, Prompts, SearchMode,
};
use crate::bench::{
    compute_metrics, hard_case_analysis, load_manifest, read_log, render_hard_cases, render_report, run_suite,
    unsolved_by_all, BenchError, MetricsOptions, NamedAdapter, SuiteOptions,
};
use crate::config::Config;
use crate::engine::{load_task, EngineError, Source};
use crate::llm::{HttpChatClient, Retrying};
use crate::mcp::{ChildTransport, McpClient, McpServer, ToolEndpoint};
use crate::oracle::{solve_greedy, solve_optimal, DEFAULT_NODE_BUDGET};
use crate::pddl::{parse_domain, parse_plan, parse_problem, serialize_plan};
use crate::validator::validate_task;

#[derive(Debug, Parser)]
#[command(name = "pddl-engine", version, about = "Interactive STRIPS simulation, validation and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a domain (and optionally a problem) and summarise it.
    Parse { domain: PathBuf, problem: Option<PathBuf> },
    /// Ground a problem and list its actions.
    Ground { domain: PathBuf, problem: PathBuf },
    /// Validate a plan file; exits 0 only when the plan is valid.
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
    },
    /// Solve with the built-in search.
    Solve {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long, conflicts_with = "greedy")]
        optimal: bool,
        #[arg(long)]
        greedy: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: usize,
    },
    /// Serve the engine tools over MCP on standard input and output.
    Serve,
    /// Run adapters over every instance of a suite manifest.
    Bench {
        manifest: PathBuf,
        /// Comma-separated adapter names: optimal, greedy, direct, agentic,
        /// scripted-agentic, or a planner from the config file.
        #[arg(long, value_delimiter = ',', required = true)]
        adapters: Vec<String>,
        /// Seconds per run; overrides the config file.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        parallelism: Option<usize>,
        /// JSONL run log; runs already in it are skipped.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compute metrics from a run log.
    Report {
        log: PathBuf,
        #[arg(long, default_value_t = 10)]
        block_size: usize,
        #[arg(long)]
        difficulty_key: Option<String>,
        /// Approaches for the co-solved table (default: all).
        #[arg(long, value_delimiter = ',')]
        compare: Option<Vec<String>>,
        /// Hard set: instances that none of these approaches solved.
        #[arg(long, value_delimiter = ',', conflicts_with = "hard")]
        hard_from: Option<Vec<String>>,
        /// Hard set given as instance indices.
        #[arg(long, value_delimiter = ',')]
        hard: Option<Vec<usize>>,
        /// Write the structured summary here as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Io { .. } => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io { .. } | BenchError::Format { .. } => Failure::Usage(e.to_string()),
            BenchError::Engine(e) => e.into(),
            other => Failure::Domain(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Run the CLI with `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = io::stdout().lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<i32, Failure> {
    match command {
        Command::Parse { domain, problem } => {
            let d = parse_domain(&read(&domain)?).map_err(|e| Failure::Domain(format!("{}: {e}", domain.display())))?;
            let reqs: Vec<&str> = d.requirements.iter().map(|r| r.flag()).collect();
            writeln!(out, "domain {}", d.name)?;
            writeln!(out, "  requirements: {}", reqs.join(" "))?;
            writeln!(out, "  types: {}", d.types.len())?;
            writeln!(out, "  constants: {}", d.constants.len())?;
            writeln!(out, "  predicates: {}", d.predicates.len())?;
            writeln!(out, "  actions: {}", d.actions.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join(" "))?;
            if let Some(problem) = problem {
                let p = parse_problem(&read(&problem)?, &d)
                    .map_err(|e| Failure::Domain(format!("{}: {e}", problem.display())))?;
                writeln!(out, "problem {}", p.name)?;
                writeln!(out, "  objects: {}", p.objects.len())?;
                writeln!(out, "  init atoms: {}", p.init.len())?;
                writeln!(out, "  goal literals: {}", p.goal.len())?;
            }
            Ok(0)
        }
        Command::Ground { domain, problem } => {
            let task = load_task(&Source::Path(domain), &Source::Path(problem))?;
            writeln!(out, "{} ground actions", task.actions().len())?;
            for a in task.actions() {
                writeln!(out, "{}", a.signature)?;
            }
            Ok(0)
        }
        Command::Validate { domain, problem, plan } => {
            let task = load_task(&Source::Path(domain), &Source::Path(problem))?;
            let plan = parse_plan(&read(&plan)?).map_err(|e| Failure::Domain(format!("{}: {e}", plan.display())))?;
            let report = validate_task(&task, &plan)?;
            writeln!(out, "{}", report.message())?;
            writeln!(out, "steps applied: {}/{}", report.steps_applied, report.plan_length)?;
            writeln!(out, "goal satisfied: {}", report.goal_satisfied)?;
            Ok(if report.valid { 0 } else { 1 })
        }
        Command::Solve {
            domain,
            problem,
            optimal: _,
            greedy,
            node_budget,
        } => {
            let task = load_task(&Source::Path(domain), &Source::Path(problem))?;
            let r = if greedy {
                solve_greedy(&task, node_budget)
            } else {
                solve_optimal(&task, node_budget)
            };
            eprintln!("expanded {} states", r.nodes_expanded);
            match r.plan {
                Some(plan) => {
                    write!(out, "{}", serialize_plan(&plan))?;
                    eprintln!("plan length {}{}", plan.len(), if r.optimal { " (optimal)" } else { "" });
                    Ok(0)
                }
                None if r.exhausted => Err(Failure::Domain(format!("node budget of {node_budget} exhausted"))),
                None => Err(Failure::Domain("goal is unreachable".into())),
            }
        }
        Command::Serve => {
            let server = McpServer::new();
            server.serve(io::stdin().lock(), io::stdout().lock())?;
            Ok(0)
        }
        Command::Bench {
            manifest,
            adapters,
            budget,
            parallelism,
            log,
            config,
        } => {
            let config = match config {
                Some(p) => Config::load(&p).map_err(|e| Failure::Usage(e.to_string()))?,
                None => Config::default(),
            };
            let tasks = load_manifest(&manifest)?;
            if tasks.is_empty() {
                return Err(Failure::Usage(format!("{}: no instances", manifest.display())));
            }
            let adapters = adapters
                .iter()
                .map(|name| build_adapter(name, &config))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::Usage)?;
            let budget = budget.unwrap_or(config.budget_s);
            if !(budget > 0.0 && budget.is_finite()) {
                return Err(Failure::Usage(format!("budget must be positive, got {budget}")));
            }
            let opts = SuiteOptions {
                budget: Duration::from_secs_f64(budget),
                parallelism: parallelism.unwrap_or(config.parallelism).max(1),
                log_path: Some(log.or(config.log).unwrap_or_else(|| PathBuf::from("bench.jsonl"))),
                ..Default::default()
            };
            let mut write_err = None;
            run_suite(&tasks, &adapters, &opts, |r| {
                let line = serde_json::to_string(r).expect("record serialises");
                if let Err(e) = writeln!(out, "{line}") {
                    write_err.get_or_insert(e);
                }
            })?;
            if let Some(e) = write_err {
                return Err(e.into());
            }
            eprintln!("log: {}", opts.log_path.as_ref().expect("set above").display());
            Ok(0)
        }
        Command::Report {
            log,
            block_size,
            difficulty_key,
            compare,
            hard_from,
            hard,
            json,
        } => {
            if block_size == 0 {
                return Err(Failure::Usage("block size must be positive".into()));
            }
            let records = read_log(&log)?;
            let report = compute_metrics(
                &records,
                &MetricsOptions {
                    block_size,
                    difficulty_key,
                    compare,
                },
            )?;
            write!(out, "{}", render_report(&report))?;
            let hard_set = match (hard_from, hard) {
                (Some(approaches), _) => Some(unsolved_by_all(&records, &approaches)?),
                (None, Some(ids)) => Some(ids),
                (None, None) => None,
            };
            let hard_report = hard_set.map(|h| hard_case_analysis(&records, &h)).transpose()?;
            if let Some(h) = &hard_report {
                write!(out, "\n{}", render_hard_cases(h))?;
            }
            if let Some(path) = json {
                let doc = serde_json::json!({ "report": report, "hard_cases": hard_report });
                std::fs::write(&path, serde_json::to_string_pretty(&doc).expect("report serialises"))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            Ok(0)
        }
    }
}

/// Build a named adapter for `bench`.
pub fn build_adapter(name: &str, config: &Config) -> Result<NamedAdapter, String> {
    let prompts = match &config.prompts_dir {
        Some(dir) => Prompts::load_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?,
        None => Prompts::default(),
    };
    let adapter = match name {
        "optimal" => NamedAdapter::new(name, |_| Ok(Box::new(OracleAdapter::new(SearchMode::Optimal)) as Box<dyn Planner>)),
        "greedy" => NamedAdapter::new(name, |_| Ok(Box::new(OracleAdapter::new(SearchMode::Greedy)) as Box<dyn Planner>)),
        "scripted-agentic" => NamedAdapter::new(name, move |task| {
            let client = oracle_policy(task)?;
            Ok(Box::new(AgenticAdapter::new(Box::new(client), Box::new(McpServer::new()))) as Box<dyn Planner>)
        }),
        "direct" | "agentic" => {
            let llm = config.llm_ready().map_err(|e| e.to_string())?.clone();
            let mcp_server = config.mcp_server.clone();
            let agentic = name == "agentic";
            NamedAdapter::new(name, move |_| {
                let client = HttpChatClient::from_env(llm.provider, llm.endpoint.clone(), llm.model.clone(), &llm.api_key_env)
                    .map_err(crate::agents::AdapterFault::Llm)?
                    .with_max_tokens(llm.max_tokens);
                let client = Box::new(Retrying::new(client));
                if !agentic {
                    return Ok(Box::new(
                        DirectAdapter::new(client).with_temperature(llm.temperature).with_prompts(prompts.clone()),
                    ) as Box<dyn Planner>);
                }
                let endpoint: Box<dyn ToolEndpoint + Send> = match &mcp_server {
                    None => Box::new(McpServer::new()),
                    Some(cmd) => {
                        let argv: Vec<&str> = cmd.split_whitespace().collect();
                        let (program, args) = argv
                            .split_first()
                            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "empty mcp_server command"))?;
                        let mut c = McpClient::new(ChildTransport::spawn(program, args)?);
                        c.initialize()?;
                        Box::new(c)
                    }
                };
                Ok(Box::new(AgenticAdapter::new(client, endpoint).with_prompts(prompts.clone())) as Box<dyn Planner>)
            })
        }
        other => match config.planners.get(other) {
            Some(template) => {
                let template = template.clone();
                NamedAdapter::new(other, move |_| Ok(Box::new(ExternalAdapter::new(template.clone())) as Box<dyn Planner>))
            }
            None => {
                return Err(format!(
                    "unknown adapter `{other}` (built in: optimal, greedy, direct, agentic, scripted-agentic)"
                ))
            }
        },
    };
    Ok(adapter)
}
