//! Step through a session by hand: query, act, fail, inspect, reset.

use pddl_engine::blocksworld::DOMAIN;
use pddl_engine::{ActionSignature, Engine, Source};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let engine = Engine::new();
    let summary = engine.initialise_session(
        &Source::Text(DOMAIN.into()),
        &Source::Text(include_str!("../data/blocksworld/sussman.pddl").into()),
        None,
    )?;
    let id = summary.session_id.clone();
    println!("{id}: {} ground actions", summary.ground_action_count);

    let show = |label: &str| -> Result<(), Box<dyn std::error::Error>> {
        let view = engine.query_current_state(&id)?;
        let atoms: Vec<String> = view.atoms.iter().map(ToString::to_string).collect();
        println!("{label}: {} goal={}", atoms.join(" "), view.goal_reached);
        Ok(())
    };
    show("init")?;

    let applicable: Vec<String> = engine.query_applicable_actions(&id)?.iter().map(ToString::to_string).collect();
    println!("applicable: {}", applicable.join(" "));

    let bad: ActionSignature = "(pick-up a)".parse()?;
    let step = engine.execute_single_action(&id, &bad)?;
    println!("{bad}: applied={} {}", step.applied, step.message);

    for a in ["(unstack c a)", "(put-down c)", "(pick-up b)", "(stack b c)", "(pick-up a)", "(stack a b)"] {
        let step = engine.execute_single_action(&id, &a.parse()?)?;
        println!("{a}: applied={} goal={}", step.applied, step.goal_reached);
    }
    show("now")?;

    for h in engine.query_action_history(&id)? {
        println!("  {:>2}. {}", h.step, h.action);
    }

    engine.reset_to_initial_state(&id)?;
    show("after reset")?;
    println!("history length after reset: {}", engine.query_action_history(&id)?.len());
    Ok(())
}
