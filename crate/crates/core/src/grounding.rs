//! Instantiate action schemas over problem objects.
//!
//! Grounding is purely syntactic: every type-consistent assignment survives
//! except those violating an equality precondition. No reachability pruning.

use std::collections::HashMap;

use serde::Serialize;

use crate::pddl::{
    ActionSchema, ActionSignature, Atom, Domain, GroundAtom, Problem, Term, EQUALITY,
};

/// A fully instantiated action. All atom lists are sorted and deduplicated,
/// and `adds` and `dels` are disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundAction {
    pub signature: ActionSignature,
    pub pre_pos: Vec<GroundAtom>,
    pub pre_neg: Vec<GroundAtom>,
    pub adds: Vec<GroundAtom>,
    pub dels: Vec<GroundAtom>,
}

fn substitute(atom: &Atom, binding: &HashMap<&str, &str>) -> GroundAtom {
    GroundAtom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => binding[v.as_str()].to_string(),
                Term::Const(c) => c.clone(),
            })
            .collect(),
    }
}

fn sorted(mut atoms: Vec<GroundAtom>) -> Vec<GroundAtom> {
    atoms.sort();
    atoms.dedup();
    atoms
}

fn instantiate(schema: &ActionSchema, args: &[&str]) -> Option<GroundAction> {
    let binding: HashMap<&str, &str> = schema
        .params
        .iter()
        .map(|p| p.name.as_str())
        .zip(args.iter().copied())
        .collect();

    let mut pre_pos = Vec::new();
    let mut pre_neg = Vec::new();
    for lit in &schema.precondition {
        let atom = substitute(&lit.atom, &binding);
        if atom.predicate == EQUALITY {
            if (atom.args[0] == atom.args[1]) != lit.positive {
                return None;
            }
            continue;
        }
        if lit.positive {
            pre_pos.push(atom);
        } else {
            pre_neg.push(atom);
        }
    }
    let adds = sorted(schema.add_effects.iter().map(|a| substitute(a, &binding)).collect());
    // Delete-then-add: an atom both deleted and added ends up true.
    let dels = sorted(
        schema
            .delete_effects
            .iter()
            .map(|a| substitute(a, &binding))
            .filter(|a| adds.binary_search(a).is_err())
            .collect(),
    );
    Some(GroundAction {
        signature: ActionSignature {
            name: schema.name.clone(),
            args: args.iter().map(|s| s.to_string()).collect(),
        },
        pre_pos: sorted(pre_pos),
        pre_neg: sorted(pre_neg),
        adds,
        dels,
    })
}

/// All ground actions of `problem`, sorted by signature.
pub fn ground(domain: &Domain, problem: &Problem) -> Vec<GroundAction> {
    let mut objects: Vec<_> = problem.all_objects(domain).collect();
    objects.sort_by(|a, b| a.name.cmp(&b.name));

    let mut out = Vec::new();
    for schema in &domain.actions {
        let candidates: Vec<Vec<&str>> = schema
            .params
            .iter()
            .map(|p| {
                objects
                    .iter()
                    .filter(|o| domain.is_subtype(&o.ty, &p.ty))
                    .map(|o| o.name.as_str())
                    .collect()
            })
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        // Odometer over the candidate lists, rightmost digit fastest.
        let mut idx = vec![0usize; candidates.len()];
        'assignments: loop {
            let args: Vec<&str> = idx.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
            if let Some(action) = instantiate(schema, &args) {
                out.push(action);
            }
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    break 'assignments;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < candidates[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    out.sort_by(|a, b| a.signature.cmp(&b.signature));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocksworld;
    use crate::pddl::{parse_domain, parse_problem};

    fn bw(n: usize) -> (Domain, Problem) {
        let d = parse_domain(blocksworld::DOMAIN).unwrap();
        let names: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
        let objects = names.join(" ");
        let p = parse_problem(
            &format!(
                "(define (problem p) (:domain blocks) (:objects {objects}) (:init (handempty)) (:goal (and)))"
            ),
            &d,
        )
        .unwrap();
        (d, p)
    }

    #[test]
    fn three_blocks_ground_to_24() {
        let (d, p) = bw(3);
        let actions = ground(&d, &p);
        assert_eq!(actions.len(), 24);
        let count = |name: &str| actions.iter().filter(|a| a.signature.name == name).count();
        assert_eq!(count("pick-up"), 3);
        assert_eq!(count("put-down"), 3);
        assert_eq!(count("stack"), 9);
        assert_eq!(count("unstack"), 9);
        assert!(actions
            .windows(2)
            .all(|w| w[0].signature < w[1].signature));
    }

    #[test]
    fn zero_objects_ground_to_nothing() {
        let (d, p) = bw(0);
        assert!(ground(&d, &p).is_empty());
    }

    #[test]
    fn identity_stack_resolves_collision_to_true() {
        let (d, p) = bw(1);
        let a = ground(&d, &p)
            .into_iter()
            .find(|a| a.signature == ActionSignature::new("stack", &["b0", "b0"]))
            .unwrap();
        let clear = GroundAtom::new("clear", &["b0"]);
        assert!(a.adds.contains(&clear));
        assert!(!a.dels.contains(&clear));
        assert!(a.dels.contains(&GroundAtom::new("holding", &["b0"])));
    }

    #[test]
    fn inequality_prunes_diagonal() {
        let d = parse_domain(
            "(define (domain d) (:requirements :equality)
               (:predicates (link ?x ?y))
               (:action connect :parameters (?x ?y)
                  :precondition (not (= ?x ?y)) :effect (link ?x ?y)))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain d) (:objects u v) (:init) (:goal (link u v)))",
            &d,
        )
        .unwrap();
        let sigs: Vec<String> = ground(&d, &p).iter().map(|a| a.signature.to_string()).collect();
        assert_eq!(sigs, vec!["(connect u v)", "(connect v u)"]);
    }

    #[test]
    fn positive_equality_keeps_diagonal_only() {
        let d = parse_domain(
            "(define (domain d) (:predicates (self ?x))
               (:action loop :parameters (?x ?y)
                  :precondition (= ?x ?y) :effect (self ?x)))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain d) (:objects u v w) (:init) (:goal (self u)))",
            &d,
        )
        .unwrap();
        let g = ground(&d, &p);
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|a| a.signature.args[0] == a.signature.args[1]));
        assert!(g.iter().all(|a| a.pre_pos.is_empty()));
    }

    #[test]
    fn types_restrict_candidates() {
        let d = parse_domain(
            "(define (domain t) (:requirements :typing)
               (:types vehicle place - object truck - vehicle)
               (:constants depot - place)
               (:predicates (at ?v - vehicle ?p - place))
               (:action move :parameters (?v - vehicle ?p - place) :effect (at ?v ?p))
               (:action park :parameters (?t - truck) :effect (at ?t depot)))",
        )
        .unwrap();
        let p = parse_problem(
            "(define (problem p) (:domain t)
               (:objects t1 - truck car - vehicle home - place)
               (:init) (:goal (at t1 home)))",
            &d,
        )
        .unwrap();
        let sigs: Vec<String> = ground(&d, &p).iter().map(|a| a.signature.to_string()).collect();
        assert_eq!(
            sigs,
            vec![
                "(move car depot)",
                "(move car home)",
                "(move t1 depot)",
                "(move t1 home)",
                "(park t1)"
            ]
        );
    }

    #[test]
    fn parameterless_action_grounds_once() {
        let d = parse_domain(
            "(define (domain d) (:predicates (on)) (:action flip :parameters () :effect (on)))",
        )
        .unwrap();
        let p = parse_problem("(define (problem p) (:domain d) (:init) (:goal (on)))", &d).unwrap();
        let g = ground(&d, &p);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].signature.to_string(), "(flip)");
    }
}
