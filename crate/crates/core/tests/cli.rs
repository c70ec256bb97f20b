use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn bw(file: &str) -> String {
    data(&format!("blocksworld/{file}")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pddl-engine")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parse_and_ground() {
    let o = run(&["parse", &bw("domain.pddl"), &bw("sussman.pddl")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("actions: pick-up put-down stack unstack"), "{text}");
    assert!(text.contains("objects: 3"));

    let o = run(&["ground", &bw("domain.pddl"), &bw("two-blocks.pddl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("12 ground actions\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&["parse", "/no/such/domain.pddl"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["solve", &bw("domain.pddl")]), 2);
    assert_eq!(code(&["report", "/no/such/log.jsonl"]), 2);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn domain_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.pddl");
    std::fs::write(&broken, "(define (domain d) (:requirements :fluents))").unwrap();
    assert_eq!(code(&["parse", broken.to_str().unwrap()]), 1);

    let unreachable = dir.path().join("self.pddl");
    std::fs::write(
        &unreachable,
        "(define (problem self) (:domain blocks) (:objects a) (:init (ontable a) (clear a) (handempty)) (:goal (on a a)))",
    )
    .unwrap();
    let o = run(&["solve", &bw("domain.pddl"), unreachable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unreachable"));
}

#[test]
fn solve_then_validate() {
    let o = run(&["solve", "--optimal", &bw("domain.pddl"), &bw("sussman.pddl")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    std::fs::write(&plan, stdout(&o)).unwrap();
    assert_eq!(code(&["validate", &bw("domain.pddl"), &bw("sussman.pddl"), plan.to_str().unwrap()]), 0);

    let o = run(&["solve", "--greedy", &bw("domain.pddl"), &bw("sussman.pddl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() >= 6);

    std::fs::write(&plan, "(pick-up a)\n").unwrap();
    let o = run(&["validate", &bw("domain.pddl"), &bw("sussman.pddl"), plan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("steps applied: 0/1"));
}

#[test]
fn serve_answers_each_request_line() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pddl-engine"))
        .arg("serve")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut stdin = child.stdin.take().unwrap();
        writeln!(stdin, r#"{{"jsonrpc":"2.0","id":1,"method":"initialize","params":{{"protocolVersion":"2025-03-26"}}}}"#).unwrap();
        writeln!(stdin, r#"{{"jsonrpc":"2.0","method":"notifications/initialized"}}"#).unwrap();
        writeln!(stdin, r#"{{"jsonrpc":"2.0","id":2,"method":"tools/list"}}"#).unwrap();
    }
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["result"]["protocolVersion"], "2025-03-26");
    assert_eq!(lines[1]["result"]["tools"].as_array().unwrap().len(), 7);
}

#[test]
fn bench_writes_and_resumes_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");
    let manifest = bw("manifest.txt");
    let args = [
        "bench",
        manifest.as_str(),
        "--adapters",
        "optimal,scripted-agentic",
        "--budget",
        "20",
        "--log",
        log.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let printed = stdout(&o);
    assert_eq!(printed.lines().count(), 8);
    assert!(printed.lines().all(|l| l.contains(r#""status":"solved""#)));
    let logged = std::fs::read_to_string(&log).unwrap();
    assert_eq!(logged.lines().count(), 8);

    let again = run(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(stdout(&again), "");
    assert_eq!(std::fs::read_to_string(&log).unwrap(), logged);

    let o = run(&["report", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Instances: 4"));
}

#[test]
fn bench_rejects_unknown_or_unconfigured_adapters() {
    let manifest = bw("manifest.txt");
    assert_eq!(code(&["bench", &manifest, "--adapters", "nonsense"]), 2);
    assert_eq!(code(&["bench", &manifest, "--adapters", "direct"]), 2);
    assert_eq!(code(&["bench", &manifest, "--adapters", "optimal", "--budget", "0"]), 2);
}

#[test]
fn report_on_published_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let fixture = data("fixtures/published_outcomes.jsonl");
    let o = run(&[
        "report",
        fixture.to_str().unwrap(),
        "--compare",
        "FD lama-first,FD seq-sat-lama-2011",
        "--hard-from",
        "FD lama-first,FD seq-sat-lama-2011",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("Direct LLM ")).unwrap();
    assert_eq!(row.split_whitespace().collect::<Vec<_>>(), ["Direct", "LLM", "65", "(63.7%)", "37", "0"]);
    assert!(text.contains("Agentic LLM / Direct LLM: 5.96x per run, 5.70x per solution"), "{text}");
    assert!(text.contains("Hard set (15 instances)"));
    assert!(text.lines().any(|l| l.split_whitespace().eq(["90-100", "3", "484.0", "374.7", "109.3"])));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["report"]["instance_count"], 102);
    assert_eq!(doc["hard_cases"]["hard_set"].as_array().unwrap().len(), 15);
}

#[test]
fn report_rejects_bad_logs() {
    let dir = tempfile::tempdir().unwrap();
    let garbled = dir.path().join("garbled.jsonl");
    std::fs::write(&garbled, "{not json}\n").unwrap();
    assert_eq!(code(&["report", garbled.to_str().unwrap()]), 2);

    let ragged = dir.path().join("ragged.jsonl");
    let rec = |i: usize, a: &str| {
        format!(
            r#"{{"instance":{i},"approach":"{a}","status":"timeout","plan_length":null,"wall_time_s":1.0,"tokens_in":0,"tokens_out":0,"attempts":1}}"#
        )
    };
    std::fs::write(&ragged, format!("{}\n{}\n{}\n", rec(0, "x"), rec(0, "y"), rec(1, "x"))).unwrap();
    let o = run(&["report", ragged.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(1, y)"));
}
