//! Whole-plan validation, replaying a plan with the same transition function
//! the interactive engine uses.

use serde::Serialize;

use crate::engine::{EngineError, Task};
use crate::pddl::{ActionSignature, Domain, GroundAtom, GroundLiteral, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingStep {
    /// 1-based position in the plan.
    pub step: usize,
    pub action: ActionSignature,
    pub unsatisfied: Vec<GroundLiteral>,
}

/// `valid` holds exactly when every step applied and the goal holds at the end.
/// A plan that applies fully but misses the goal has no `failing_step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub steps_applied: usize,
    pub failing_step: Option<FailingStep>,
    pub final_state: Vec<GroundAtom>,
    pub goal_satisfied: bool,
    pub plan_length: usize,
}

impl ValidationReport {
    pub fn message(&self) -> String {
        match (&self.failing_step, self.goal_satisfied) {
            (Some(f), _) => {
                let lits: Vec<String> = f.unsatisfied.iter().map(ToString::to_string).collect();
                format!(
                    "step {} {} is not applicable; unsatisfied preconditions: {}",
                    f.step,
                    f.action,
                    lits.join(" ")
                )
            }
            (None, true) => format!("plan is valid ({} actions)", self.plan_length),
            (None, false) => format!(
                "all {} actions apply but the goal is not satisfied",
                self.plan_length
            ),
        }
    }
}

/// Validate against an already grounded task. Unknown signatures are errors,
/// checked up front so that no partial simulation is reported for them.
pub fn validate_task(task: &Task, plan: &[ActionSignature]) -> Result<ValidationReport, EngineError> {
    let indices = plan
        .iter()
        .map(|s| task.action_index(s).ok_or_else(|| EngineError::UnknownAction(s.clone())))
        .collect::<Result<Vec<_>, _>>()?;

    let mut state = task.init().clone();
    let mut failing_step = None;
    let mut steps_applied = 0;
    for (i, &a) in indices.iter().enumerate() {
        let unsatisfied = task.unsatisfied(&state, a);
        if !unsatisfied.is_empty() {
            failing_step = Some(FailingStep {
                step: i + 1,
                action: plan[i].clone(),
                unsatisfied,
            });
            break;
        }
        state = task.apply(&state, a);
        steps_applied += 1;
    }
    let goal_satisfied = task.goal_satisfied(&state);
    Ok(ValidationReport {
        valid: failing_step.is_none() && goal_satisfied,
        steps_applied,
        failing_step,
        final_state: task.atoms_of(&state),
        goal_satisfied,
        plan_length: plan.len(),
    })
}

/// Ground `domain`/`problem` and validate `plan` from the initial state.
pub fn validate_plan(
    domain: &Domain,
    problem: &Problem,
    plan: &[ActionSignature],
) -> Result<ValidationReport, EngineError> {
    let task = Task::new(domain.clone(), problem.clone());
    validate_task(&task, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocksworld::DOMAIN;
    use crate::pddl::{parse_domain, parse_plan, parse_problem};

    fn setup(problem: &str) -> (Domain, Problem) {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem(problem, &d).unwrap();
        (d, p)
    }

    const TWO: &str = include_str!("../data/blocksworld/two-blocks.pddl");

    #[test]
    fn empty_plan_on_satisfied_problem() {
        let (d, p) = setup(include_str!("../data/blocksworld/already-solved.pddl"));
        let r = validate_plan(&d, &p, &[]).unwrap();
        assert!(r.valid);
        assert_eq!(r.plan_length, 0);
    }

    #[test]
    fn two_step_plan_is_valid() {
        let (d, p) = setup(TWO);
        let plan = parse_plan("(pick-up a)\n(stack a b)\n").unwrap();
        let r = validate_plan(&d, &p, &plan).unwrap();
        assert!(r.valid && r.goal_satisfied);
        assert_eq!(r.plan_length, 2);
        assert_eq!(r.steps_applied, 2);
        assert!(r.failing_step.is_none());
        assert!(r.final_state.contains(&GroundAtom::new("on", &["a", "b"])));
    }

    #[test]
    fn inapplicable_first_step_is_reported() {
        let (d, p) = setup(TWO);
        let plan = parse_plan("(stack a b)\n").unwrap();
        let r = validate_plan(&d, &p, &plan).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.failing_step,
            Some(FailingStep {
                step: 1,
                action: plan[0].clone(),
                unsatisfied: vec![GroundLiteral::pos(GroundAtom::new("holding", &["a"]))],
            })
        );
        assert_eq!(r.steps_applied, 0);
        assert_eq!(r.final_state, p.init);
        assert!(r.message().contains("step 1 (stack a b)"));
    }

    #[test]
    fn legal_but_wrong_plan_has_no_failing_step() {
        let (d, p) = setup(TWO);
        let plan = parse_plan("(pick-up b)\n(stack b a)\n").unwrap();
        let r = validate_plan(&d, &p, &plan).unwrap();
        assert!(!r.valid);
        assert!(r.failing_step.is_none());
        assert!(!r.goal_satisfied);
        assert_eq!(r.steps_applied, 2);
        assert!(r.message().contains("goal is not satisfied"));
    }

    #[test]
    fn unknown_action_is_an_error() {
        let (d, p) = setup(TWO);
        let plan = parse_plan("(pick-up a)\n(teleport a)\n").unwrap();
        assert!(matches!(
            validate_plan(&d, &p, &plan),
            Err(EngineError::UnknownAction(s)) if s.name == "teleport"
        ));
    }

    #[test]
    fn valid_plan_prefixes_all_apply() {
        let (d, p) = setup(include_str!("../data/blocksworld/sussman.pddl"));
        let plan = parse_plan(include_str!("../data/blocksworld/sussman.plan")).unwrap();
        assert!(validate_plan(&d, &p, &plan).unwrap().valid);
        for k in 0..plan.len() {
            let r = validate_plan(&d, &p, &plan[..k]).unwrap();
            assert!(r.failing_step.is_none());
            assert_eq!(r.steps_applied, k);
            assert!(!r.goal_satisfied);
        }
    }
}
