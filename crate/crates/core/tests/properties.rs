use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Duration;

use pddl_engine::agents::{oracle_policy, AgenticAdapter, DirectAdapter, Planner, PlanningTask, Status};
use pddl_engine::bench::{compute_metrics, plan_length_table, MetricsOptions, RecordStatus, RunRecord};
use pddl_engine::blocksworld::{self, random_problem};
use pddl_engine::llm::{LlmError, Retrying, ScriptedClient, ScriptedTurn};
use pddl_engine::mcp::{McpError, McpServer, ToolDescriptor, ToolEndpoint, ToolResult};
use pddl_engine::oracle::DEFAULT_NODE_BUDGET;
use pddl_engine::{
    ground, parse_domain, parse_problem, serialize_plan, solve_greedy, solve_optimal, validate_task, ActionSignature,
    Engine, Source, Task,
};
use proptest::prelude::*;
use proptest::sample::Index;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn blocks(seed: u64, n: usize) -> (String, Task) {
    let problem = random_problem("p", n, &mut StdRng::seed_from_u64(seed));
    let domain = parse_domain(blocksworld::DOMAIN).unwrap();
    let parsed = parse_problem(&problem, &domain).unwrap();
    (problem, Task::new(domain, parsed))
}

fn session(engine: &Engine, problem: &str) -> String {
    engine
        .initialise_session(&Source::Text(blocksworld::DOMAIN.into()), &Source::Text(problem.into()), None)
        .unwrap()
        .session_id
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn session_invariants(seed in any::<u64>(), n in 1usize..=4, moves in prop::collection::vec(any::<Index>(), 0..40)) {
        let (problem, task) = blocks(seed, n);
        let engine = Engine::new();
        let id = session(&engine, &problem);
        for m in moves {
            // One move in eight is a reset.
            if m.index(8) == 0 {
                let view = engine.reset_to_initial_state(&id).unwrap();
                let fresh = session(&engine, &problem);
                prop_assert_eq!(view, engine.query_current_state(&fresh).unwrap());
                prop_assert!(engine.query_action_history(&id).unwrap().is_empty());
                engine.close_session(&fresh);
                continue;
            }
            let sig = task.actions()[m.index(task.actions().len())].signature.clone();
            let before = engine.query_current_state(&id).unwrap();
            let applicable = engine.query_applicable_actions(&id).unwrap();
            let step = engine.execute_single_action(&id, &sig).unwrap();
            prop_assert_eq!(step.applied, applicable.contains(&sig));
            if !step.applied {
                prop_assert_eq!(&step.state, &before.atoms);
                prop_assert!(!step.unsatisfied.is_empty());
            }
            let mut replayed = task.init().clone();
            for h in engine.query_action_history(&id).unwrap() {
                replayed = task.apply(&replayed, task.action_index(&h.action).unwrap());
            }
            prop_assert_eq!(task.atoms_of(&replayed), engine.query_current_state(&id).unwrap().atoms);
        }
    }

    #[test]
    fn problems_print_and_reparse(seed in any::<u64>(), n in 1usize..=6) {
        let (_, task) = blocks(seed, n);
        let printed = task.problem.to_string();
        prop_assert_eq!(parse_problem(&printed, &task.domain).unwrap(), task.problem.clone());
    }

    #[test]
    fn searches_agree_and_validate(seed in any::<u64>(), n in 1usize..=4) {
        let (_, task) = blocks(seed, n);
        let optimal = solve_optimal(&task, DEFAULT_NODE_BUDGET).plan.unwrap();
        let greedy = solve_greedy(&task, DEFAULT_NODE_BUDGET).plan.unwrap();
        prop_assert!(greedy.len() >= optimal.len());
        prop_assert!(validate_task(&task, &optimal).unwrap().valid);
        prop_assert!(validate_task(&task, &greedy).unwrap().valid);
        for k in 0..=optimal.len() {
            let r = validate_task(&task, &optimal[..k]).unwrap();
            prop_assert!(r.failing_step.is_none());
            prop_assert_eq!(r.steps_applied, k);
        }
    }

    #[test]
    fn plan_text_round_trips(seed in any::<u64>(), n in 2usize..=4) {
        let (_, task) = blocks(seed, n);
        let plan = solve_greedy(&task, DEFAULT_NODE_BUDGET).plan.unwrap();
        prop_assert_eq!(pddl_engine::parse_plan(&serialize_plan(&plan)).unwrap(), plan);
    }
}

const TYPES: [&str; 3] = ["object", "t1", "t2"];

/// Objects of type `t2` are also `t1`; every object is an `object`.
fn matches(object_type: usize, param_type: usize) -> bool {
    param_type == 0 || param_type == object_type || (param_type == 1 && object_type == 2)
}

fn typed_domain(params: &[usize], distinct: bool) -> String {
    let ps: Vec<String> = params.iter().enumerate().map(|(i, t)| format!("?a{i} - {}", TYPES[*t])).collect();
    let pre = if distinct && params.len() >= 2 { "(not (= ?a0 ?a1))" } else { "(q)" };
    let eff = if params.is_empty() { "(q)".to_string() } else { "(p ?a0)".to_string() };
    format!(
        "(define (domain d) (:requirements :strips :typing :equality :negative-preconditions)
           (:types t1 - object t2 - t1)
           (:predicates (p ?x - object) (q))
           (:action act :parameters ({}) :precondition (and {pre}) :effect (and {eff})))",
        ps.join(" ")
    )
}

fn typed_problem(objects: &[usize]) -> String {
    let os: Vec<String> = objects.iter().enumerate().map(|(i, t)| format!("o{i} - {}", TYPES[*t])).collect();
    format!(
        "(define (problem pr) (:domain d) (:objects {}) (:init (q)) (:goal (and (q))))",
        os.join(" ")
    )
}

proptest! {
    #[test]
    fn grounding_matches_enumeration(
        params in prop::collection::vec(0usize..3, 0..=3),
        objects in prop::collection::vec(0usize..3, 0..=5),
        distinct in any::<bool>(),
    ) {
        let domain = parse_domain(&typed_domain(&params, distinct)).unwrap();
        let problem = parse_problem(&typed_problem(&objects), &domain).unwrap();
        let grounded = ground(&domain, &problem);

        let mut expected = BTreeSet::new();
        let mut tuple = vec![0usize; params.len()];
        let total = objects.len().pow(params.len() as u32);
        for code in 0..total {
            let mut c = code;
            for slot in tuple.iter_mut() {
                *slot = c % objects.len();
                c /= objects.len();
            }
            if !tuple.iter().zip(&params).all(|(&o, &p)| matches(objects[o], p)) {
                continue;
            }
            if distinct && params.len() >= 2 && tuple[0] == tuple[1] {
                continue;
            }
            let args: Vec<String> = tuple.iter().map(|o| format!("o{o}")).collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            expected.insert(ActionSignature::new("act", &refs));
        }
        let got: Vec<ActionSignature> = grounded.iter().map(|a| a.signature.clone()).collect();
        prop_assert_eq!(&got, &expected.iter().cloned().collect::<Vec<_>>());
        prop_assert_eq!(&grounded, &ground(&domain, &problem));
        for a in &grounded {
            let atom = a.adds[0].to_string();
            match a.signature.args.first() {
                Some(first) => prop_assert_eq!(atom, format!("(p {first})")),
                None => prop_assert_eq!(atom, "(q)"),
            }
        }
    }
}

fn outcome_strategy() -> impl Strategy<Value = (RecordStatus, usize)> {
    (
        prop_oneof![
            3 => Just(RecordStatus::Solved),
            1 => Just(RecordStatus::Timeout),
            1 => Just(RecordStatus::EarlyExit),
        ],
        1usize..200,
    )
}

fn grid(cells: &[Vec<(RecordStatus, usize)>]) -> Vec<RunRecord> {
    let mut out = Vec::new();
    for (i, row) in cells.iter().enumerate() {
        for (a, &(status, len)) in row.iter().enumerate() {
            out.push(RunRecord {
                instance: i,
                name: format!("i{i}"),
                approach: format!("a{a}"),
                status,
                plan_length: (status == RecordStatus::Solved).then_some(len),
                wall_time_s: 1.0,
                tokens_in: 10 * a as u64,
                tokens_out: a as u64,
                attempts: 1,
                failed_action_attempts: 0,
                tokens_estimated: false,
                error: None,
                timestamp: None,
                extra: Default::default(),
            });
        }
    }
    out
}

fn cells_strategy() -> impl Strategy<Value = Vec<Vec<(RecordStatus, usize)>>> {
    (2usize..=4).prop_flat_map(|k| prop::collection::vec(prop::collection::vec(outcome_strategy(), k), 1..35))
}

proptest! {
    #[test]
    fn counting_identity_and_blocks(cells in cells_strategy(), block_size in 1usize..12) {
        let records = grid(&cells);
        let opts = MetricsOptions { block_size, ..MetricsOptions::default() };
        let report = compute_metrics(&records, &opts).unwrap();
        for s in &report.summaries {
            prop_assert_eq!(s.solved + s.timeout + s.early_exit + s.harness_error, report.instance_count);
            prop_assert_eq!(s.total, report.instance_count);
        }
        let covered: usize = report.difficulty.iter().map(|d| d.instances).sum();
        prop_assert_eq!(covered, cells.len());
        prop_assert!(report.difficulty.iter().all(|d| d.instances > 0 && d.instances <= block_size));
        let sizes: Vec<usize> = report.difficulty.iter().map(|d| d.instances).collect();
        prop_assert!(sizes[..sizes.len() - 1].iter().all(|&s| s == block_size));
    }

    #[test]
    fn survivorship_guard(cells in cells_strategy(), pick in any::<Index>(), new_len in 1usize..500) {
        let mut records = grid(&cells);
        let approaches: Vec<String> = (0..cells[0].len()).map(|a| format!("a{a}")).collect();
        let before = plan_length_table(&records, &approaches, 10).unwrap();
        let outside: Vec<usize> = (0..cells.len()).filter(|i| !before.co_solved.contains(i)).collect();
        prop_assume!(!outside.is_empty());
        let target = outside[pick.index(outside.len())];
        for r in records.iter_mut().filter(|r| r.instance == target && r.solved()) {
            r.plan_length = Some(new_len);
        }
        let after = plan_length_table(&records, &approaches, 10).unwrap();
        prop_assert_eq!(before, after);
    }
}

fn sussman() -> PlanningTask {
    PlanningTask::from_text("sussman", blocksworld::DOMAIN, include_str!("../data/blocksworld/sussman.pddl"))
}

const SUSSMAN_PLAN: &str = "```\n(unstack c a)\n(put-down c)\n(pick-up b)\n(stack b c)\n(pick-up a)\n(stack a b)\n```";

fn delayed_script(bad: usize, step_ms: u64) -> ScriptedClient {
    let mut turns: Vec<ScriptedTurn> = (0..bad)
        .map(|_| ScriptedTurn::text("(pick-up a)").with_delay(Duration::from_millis(step_ms)))
        .collect();
    turns.push(ScriptedTurn::text(SUSSMAN_PLAN).with_delay(Duration::from_millis(step_ms)));
    ScriptedClient::new(turns)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn budget_monotonicity(bad in 0usize..4, step_ms in 10u64..40, budgets in prop::collection::vec(20u64..200, 2..4)) {
        let mut budgets = budgets;
        budgets.sort_unstable();
        budgets.dedup();
        let mut timed_out_at = None;
        for &b in budgets.iter().rev() {
            let mut adapter = DirectAdapter::new(Box::new(delayed_script(bad, step_ms)));
            let out = adapter.solve(&sussman(), Duration::from_millis(b)).unwrap();
            if out.status == Status::Timeout {
                timed_out_at.get_or_insert(b);
            } else if let Some(larger) = timed_out_at {
                prop_assert!(false, "timeout at {larger} ms but solved at {b} ms");
            }
        }
    }

    #[test]
    fn usage_counts_completed_responses_only(pattern in prop::collection::vec((any::<bool>(), 1u64..500, 1u64..50), 0..6)) {
        let mut turns = Vec::new();
        let (mut want_in, mut want_out) = (0, 0);
        for &(fail_first, i, o) in &pattern {
            if fail_first {
                turns.push(ScriptedTurn::Fail(LlmError::Transient("503".into())));
            }
            turns.push(ScriptedTurn::text("(pick-up a)").with_usage(i, o));
            want_in += i;
            want_out += o;
        }
        turns.push(ScriptedTurn::text(SUSSMAN_PLAN).with_usage(7, 3));
        let client = Retrying::with_backoff(ScriptedClient::new(turns), Duration::from_millis(1), Duration::from_millis(2));
        let out = DirectAdapter::new(Box::new(client)).solve(&sussman(), Duration::from_secs(10)).unwrap();
        prop_assert_eq!(out.status, Status::Solved);
        prop_assert_eq!((out.tokens_in, out.tokens_out), (want_in + 7, want_out + 3));
        prop_assert_eq!(out.attempts as usize, pattern.len() + 1);
        prop_assert!(!out.tokens_estimated);
    }
}

struct SharedServer(Arc<McpServer>);

impl ToolEndpoint for SharedServer {
    fn list_tools(&mut self) -> Result<Vec<ToolDescriptor>, McpError> {
        Ok(pddl_engine::mcp::describe_tools())
    }

    fn call_tool(&mut self, name: &str, arguments: serde_json::Value) -> Result<ToolResult, McpError> {
        self.0.call_tool(name, arguments).map_err(|e| McpError::Rpc {
            code: e.code,
            message: e.message,
        })
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn agentic_plan_equals_history(seed in any::<u64>(), n in 2usize..=4) {
        let text = random_problem("p", n, &mut StdRng::seed_from_u64(seed));
        let task = PlanningTask::from_text("p", blocksworld::DOMAIN, text);
        let server = Arc::new(McpServer::new());
        let mut adapter = AgenticAdapter::new(
            Box::new(oracle_policy(&task).unwrap()),
            Box::new(SharedServer(server.clone())),
        );
        let out = adapter.solve(&task, Duration::from_secs(10)).unwrap();
        prop_assert_eq!(out.status, Status::Solved);
        let ids = server.engine().session_ids();
        prop_assert_eq!(ids.len(), 1);
        let history: Vec<ActionSignature> =
            server.engine().query_action_history(&ids[0]).unwrap().into_iter().map(|h| h.action).collect();
        prop_assert_eq!(out.plan.unwrap(), history);
        prop_assert_eq!(out.failed_action_attempts, 0);
    }
}
