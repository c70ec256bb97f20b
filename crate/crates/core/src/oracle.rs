//! Desk-scale reference planners over the grounded transition system.
//!
//! [`solve_optimal`] is breadth-first and returns shortest plans;
//! [`solve_greedy`] is greedy best-first on the number of unsatisfied goal
//! literals. Both keep a visited set keyed by the canonical state, so no
//! state is expanded twice.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use serde::Serialize;

use crate::engine::{State, Task};
use crate::pddl::ActionSignature;
use crate::validator::validate_task;

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub plan: Option<Vec<ActionSignature>>,
    pub nodes_expanded: usize,
    /// Set by the breadth-first search when its answer is exact.
    pub optimal: bool,
    /// The node budget ran out before the search closed.
    pub exhausted: bool,
}

struct Node {
    parent: usize,
    action: usize,
}

/// Search graph bookkeeping shared by both planners.
struct Graph {
    nodes: Vec<Node>,
    states: Vec<State>,
    seen: HashMap<State, usize>,
}

impl Graph {
    fn new(root: State) -> Self {
        let mut seen = HashMap::new();
        seen.insert(root.clone(), 0);
        Graph {
            nodes: vec![Node {
                parent: usize::MAX,
                action: usize::MAX,
            }],
            states: vec![root],
            seen,
        }
    }

    /// Register a successor; `None` when the state was already seen.
    fn add(&mut self, state: State, parent: usize, action: usize) -> Option<usize> {
        match self.seen.entry(state) {
            Entry::Occupied(_) => None,
            Entry::Vacant(v) => {
                let id = self.nodes.len();
                self.states.push(v.key().clone());
                v.insert(id);
                self.nodes.push(Node { parent, action });
                Some(id)
            }
        }
    }

    fn plan_to(&self, task: &Task, mut node: usize) -> Vec<ActionSignature> {
        let mut steps = Vec::new();
        while node != 0 {
            let n = &self.nodes[node];
            steps.push(task.actions()[n.action].signature.clone());
            node = n.parent;
        }
        steps.reverse();
        steps
    }
}

fn checked(task: &Task, plan: Vec<ActionSignature>) -> Vec<ActionSignature> {
    let report = validate_task(task, &plan).expect("oracle plans use grounded actions");
    assert!(report.valid, "oracle produced an invalid plan: {}", report.message());
    plan
}

/// Breadth-first search for a shortest plan, expanding at most `node_budget` states.
pub fn solve_optimal(task: &Task, node_budget: usize) -> SearchResult {
    assert!(node_budget > 0, "node budget must be positive");
    let root = task.init().clone();
    if task.goal_satisfied(&root) {
        return SearchResult {
            plan: Some(Vec::new()),
            nodes_expanded: 0,
            optimal: true,
            exhausted: false,
        };
    }
    let mut graph = Graph::new(root);
    let mut frontier = VecDeque::from([0usize]);
    let mut expanded = 0;
    while let Some(node) = frontier.pop_front() {
        if expanded >= node_budget {
            return SearchResult {
                plan: None,
                nodes_expanded: expanded,
                optimal: false,
                exhausted: true,
            };
        }
        expanded += 1;
        let state = graph.states[node].clone();
        for a in task.applicable(&state) {
            let next = task.apply(&state, a);
            let goal = task.goal_satisfied(&next);
            if let Some(id) = graph.add(next, node, a) {
                if goal {
                    return SearchResult {
                        plan: Some(checked(task, graph.plan_to(task, id))),
                        nodes_expanded: expanded,
                        optimal: true,
                        exhausted: false,
                    };
                }
                frontier.push_back(id);
            }
        }
    }
    SearchResult {
        plan: None,
        nodes_expanded: expanded,
        optimal: true,
        exhausted: false,
    }
}

/// Greedy best-first search on the goal-count heuristic. Ties go to the
/// earlier-generated node, so results are deterministic.
pub fn solve_greedy(task: &Task, node_budget: usize) -> SearchResult {
    assert!(node_budget > 0, "node budget must be positive");
    let root = task.init().clone();
    if task.goal_satisfied(&root) {
        return SearchResult {
            plan: Some(Vec::new()),
            nodes_expanded: 0,
            optimal: false,
            exhausted: false,
        };
    }
    let h0 = task.unsatisfied_goal_count(&root);
    let mut graph = Graph::new(root);
    let mut open = BinaryHeap::from([Reverse((h0, 0usize))]);
    let mut expanded = 0;
    while let Some(Reverse((_, node))) = open.pop() {
        if expanded >= node_budget {
            return SearchResult {
                plan: None,
                nodes_expanded: expanded,
                optimal: false,
                exhausted: true,
            };
        }
        expanded += 1;
        let state = graph.states[node].clone();
        for a in task.applicable(&state) {
            let next = task.apply(&state, a);
            let h = task.unsatisfied_goal_count(&next);
            if let Some(id) = graph.add(next, node, a) {
                if h == 0 {
                    return SearchResult {
                        plan: Some(checked(task, graph.plan_to(task, id))),
                        nodes_expanded: expanded,
                        optimal: false,
                        exhausted: false,
                    };
                }
                open.push(Reverse((h, id)));
            }
        }
    }
    SearchResult {
        plan: None,
        nodes_expanded: expanded,
        optimal: false,
        exhausted: false,
    }
}
