use std::collections::{BTreeSet, HashMap};

use crate::grounding::{ground, GroundAction};
use crate::pddl::{ActionSignature, Domain, GroundAtom, GroundLiteral, Problem};

/// Index into [`Task::atoms`]. Ids follow the lexicographic atom order.
pub type AtomId = u32;

/// A set of ground atoms under the closed-world assumption, stored as a
/// bitset over the task's atom universe. Bit order equals sorted atom
/// order, so equality and hashing behave like a sorted atom tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    bits: Vec<u64>,
}

impl State {
    fn empty(universe: usize) -> Self {
        State {
            bits: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn contains(&self, id: AtomId) -> bool {
        let i = id as usize;
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    fn insert(&mut self, id: AtomId) {
        let i = id as usize;
        self.bits[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, id: AtomId) {
        let i = id as usize;
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    /// Atom ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64)
                .filter(move |b| word & (1 << b) != 0)
                .map(move |b| (w * 64 + b) as AtomId)
        })
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

#[derive(Debug, Clone)]
struct CompiledAction {
    pre_pos: Vec<AtomId>,
    pre_neg: Vec<AtomId>,
    adds: Vec<AtomId>,
    dels: Vec<AtomId>,
}

/// A parsed domain/problem pair with its eager grounding.
#[derive(Debug, Clone)]
pub struct Task {
    pub domain: Domain,
    pub problem: Problem,
    actions: Vec<GroundAction>,
    compiled: Vec<CompiledAction>,
    atoms: Vec<GroundAtom>,
    atom_ids: HashMap<GroundAtom, AtomId>,
    action_ids: HashMap<ActionSignature, usize>,
    init: State,
    goal_pos: Vec<AtomId>,
    goal_neg: Vec<AtomId>,
}

impl Task {
    pub fn new(domain: Domain, problem: Problem) -> Self {
        let actions = ground(&domain, &problem);

        let mut universe: BTreeSet<GroundAtom> = problem.init.iter().cloned().collect();
        universe.extend(problem.goal.iter().map(|l| l.atom.clone()));
        for a in &actions {
            universe.extend(a.pre_pos.iter().cloned());
            universe.extend(a.pre_neg.iter().cloned());
            universe.extend(a.adds.iter().cloned());
            universe.extend(a.dels.iter().cloned());
        }
        let atoms: Vec<GroundAtom> = universe.into_iter().collect();
        let atom_ids: HashMap<GroundAtom, AtomId> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i as AtomId))
            .collect();
        let ids = |list: &[GroundAtom]| list.iter().map(|a| atom_ids[a]).collect::<Vec<_>>();

        let compiled = actions
            .iter()
            .map(|a| CompiledAction {
                pre_pos: ids(&a.pre_pos),
                pre_neg: ids(&a.pre_neg),
                adds: ids(&a.adds),
                dels: ids(&a.dels),
            })
            .collect();
        let action_ids = actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.signature.clone(), i))
            .collect();

        let mut init = State::empty(atoms.len());
        for a in &problem.init {
            init.insert(atom_ids[a]);
        }
        let goal_pos = problem
            .goal
            .iter()
            .filter(|l| l.positive)
            .map(|l| atom_ids[&l.atom])
            .collect();
        let goal_neg = problem
            .goal
            .iter()
            .filter(|l| !l.positive)
            .map(|l| atom_ids[&l.atom])
            .collect();

        Task {
            domain,
            problem,
            actions,
            compiled,
            atoms,
            atom_ids,
            action_ids,
            init,
            goal_pos,
            goal_neg,
        }
    }

    /// Ground actions in signature order.
    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action_index(&self, signature: &ActionSignature) -> Option<usize> {
        self.action_ids.get(signature).copied()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn atom_id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.atom_ids.get(atom).copied()
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    /// Build a state from explicit atoms; `None` if an atom lies outside
    /// the task's atom universe.
    pub fn state_from_atoms<'a>(&self, atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Option<State> {
        let mut s = State::empty(self.atoms.len());
        for a in atoms {
            s.insert(self.atom_id(a)?);
        }
        Some(s)
    }

    /// Sorted atoms of `state`.
    pub fn atoms_of(&self, state: &State) -> Vec<GroundAtom> {
        state.ids().map(|id| self.atom(id).clone()).collect()
    }

    pub fn is_applicable(&self, state: &State, action: usize) -> bool {
        let a = &self.compiled[action];
        a.pre_pos.iter().all(|&p| state.contains(p)) && a.pre_neg.iter().all(|&p| !state.contains(p))
    }

    /// Precondition literals of `action` that fail in `state`, in schema order
    /// (positive literals first).
    pub fn unsatisfied(&self, state: &State, action: usize) -> Vec<GroundLiteral> {
        let a = &self.compiled[action];
        let pos = a
            .pre_pos
            .iter()
            .filter(|&&p| !state.contains(p))
            .map(|&p| GroundLiteral::pos(self.atom(p).clone()));
        let neg = a
            .pre_neg
            .iter()
            .filter(|&&p| state.contains(p))
            .map(|&p| GroundLiteral::neg(self.atom(p).clone()));
        pos.chain(neg).collect()
    }

    /// Successor state: delete effects first, then add effects.
    /// Applicability is not checked.
    pub fn apply(&self, state: &State, action: usize) -> State {
        let a = &self.compiled[action];
        let mut next = state.clone();
        for &d in &a.dels {
            next.remove(d);
        }
        for &p in &a.adds {
            next.insert(p);
        }
        next
    }

    pub fn applicable<'a>(&'a self, state: &'a State) -> impl Iterator<Item = usize> + 'a {
        (0..self.compiled.len()).filter(move |&i| self.is_applicable(state, i))
    }

    pub fn goal_satisfied(&self, state: &State) -> bool {
        self.goal_pos.iter().all(|&p| state.contains(p))
            && self.goal_neg.iter().all(|&p| !state.contains(p))
    }

    /// Number of goal literals that do not hold in `state`.
    pub fn unsatisfied_goal_count(&self, state: &State) -> usize {
        self.goal_pos.iter().filter(|&&p| !state.contains(p)).count()
            + self.goal_neg.iter().filter(|&&p| state.contains(p)).count()
    }
}

/// Goal test over an explicit atom set: every positive literal's atom is
/// present and every negative literal's atom is absent.
pub fn goal_satisfied(state: &BTreeSet<GroundAtom>, goal: &[GroundLiteral]) -> bool {
    goal.iter()
        .all(|l| state.contains(&l.atom) == l.positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};

    fn two_blocks() -> Task {
        let d = parse_domain(crate::blocksworld::DOMAIN).unwrap();
        let p = parse_problem(include_str!("../../data/blocksworld/two-blocks.pddl"), &d).unwrap();
        Task::new(d, p)
    }

    fn atoms(list: &[(&str, &[&str])]) -> BTreeSet<GroundAtom> {
        list.iter().map(|(p, a)| GroundAtom::new(*p, a)).collect()
    }

    #[test]
    fn bitset_roundtrips_atoms_in_sorted_order() {
        let t = two_blocks();
        let got = t.atoms_of(t.init());
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(got, sorted);
        assert_eq!(got, t.problem.init);
        assert_eq!(t.state_from_atoms(&got).unwrap(), *t.init());
        assert_eq!(t.init().len(), 5);
    }

    #[test]
    fn pick_up_effects() {
        let t = two_blocks();
        let i = t.action_index(&ActionSignature::new("pick-up", &["a"])).unwrap();
        assert!(t.is_applicable(t.init(), i));
        let next = t.apply(t.init(), i);
        let expected = atoms(&[("clear", &["b"]), ("holding", &["a"]), ("ontable", &["b"])]);
        assert_eq!(t.atoms_of(&next).into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn unsatisfied_lists_failing_literals() {
        let t = two_blocks();
        let i = t.action_index(&ActionSignature::new("stack", &["a", "b"])).unwrap();
        assert_eq!(
            t.unsatisfied(t.init(), i),
            vec![GroundLiteral::pos(GroundAtom::new("holding", &["a"]))]
        );
    }

    #[test]
    fn goal_test_examples() {
        let on_ab = GroundAtom::new("on", &["a", "b"]);
        let state = atoms(&[("on", &["a", "b"]), ("clear", &["a"])]);
        assert!(goal_satisfied(&state, &[GroundLiteral::pos(on_ab.clone())]));
        assert!(goal_satisfied(&state, &[]));
        assert!(!goal_satisfied(&state, &[GroundLiteral::neg(on_ab)]));
        assert!(goal_satisfied(&BTreeSet::new(), &[]));
    }
}
