//! Validate plans: a correct one, an illegal one and a legal but incomplete one.
//!
//! cargo run --example validate_plan [domain.pddl problem.pddl plan.txt]

use std::env;
use std::fs;

use pddl_engine::engine::{load_task, Source};
use pddl_engine::{parse_plan, validate_task};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    if let [d, p, plan] = args.as_slice() {
        let task = load_task(&Source::Path(d.into()), &Source::Path(p.into()))?;
        let report = validate_task(&task, &parse_plan(&fs::read_to_string(plan)?)?)?;
        println!("{}", report.message());
        std::process::exit(if report.valid { 0 } else { 1 });
    }

    let task = load_task(
        &Source::Text(pddl_engine::blocksworld::DOMAIN.into()),
        &Source::Text(include_str!("../data/blocksworld/sussman.pddl").into()),
    )?;
    let candidates = [
        ("shipped plan", include_str!("../data/blocksworld/sussman.plan")),
        ("wrong order", "(pick-up b)\n(stack b c)\n(unstack c a)\n"),
        ("stops early", "(unstack c a)\n(put-down c)\n"),
    ];
    for (label, text) in candidates {
        let plan = parse_plan(text)?;
        let r = validate_task(&task, &plan)?;
        println!("{label}: valid={} applied {}/{} goal={}", r.valid, r.steps_applied, r.plan_length, r.goal_satisfied);
        println!("  {}", r.message());
        if let Some(f) = &r.failing_step {
            println!("  step {} {} fails", f.step, f.action);
        }
    }
    Ok(())
}
