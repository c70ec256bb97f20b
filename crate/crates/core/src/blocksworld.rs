//! The four-operator Blocksworld domain and a random instance generator.

use rand::seq::SliceRandom;
use rand::Rng;

/// IPC-2000 four-operator Blocksworld (untyped STRIPS).
pub const DOMAIN: &str = include_str!("../data/blocksworld/domain.pddl");

/// Towers listed bottom to top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub towers: Vec<Vec<String>>,
}

impl Configuration {
    /// Shuffle `blocks` and cut the sequence into towers at random points.
    pub fn random<R: Rng + ?Sized>(blocks: &[String], rng: &mut R) -> Self {
        let mut order = blocks.to_vec();
        order.shuffle(rng);
        let mut towers: Vec<Vec<String>> = Vec::new();
        for b in order {
            match towers.last_mut() {
                Some(t) if rng.random_bool(0.5) => t.push(b),
                _ => towers.push(vec![b]),
            }
        }
        Configuration { towers }
    }

    fn on_atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in &self.towers {
            for pair in t.windows(2) {
                out.push(format!("(on {} {})", pair[1], pair[0]));
            }
        }
        out
    }

    /// The complete state description with an empty hand.
    pub fn state_atoms(&self) -> Vec<String> {
        let mut out = vec!["(handempty)".to_string()];
        for t in &self.towers {
            if let (Some(bottom), Some(top)) = (t.first(), t.last()) {
                out.push(format!("(ontable {bottom})"));
                out.push(format!("(clear {top})"));
            }
        }
        out.extend(self.on_atoms());
        out
    }
}

pub fn block_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("b{}", i + 1)).collect()
}

/// Problem text with the full `init` configuration and the `on` relations of
/// `goal` as the goal conjunction (the IPC convention).
pub fn problem_text(name: &str, init: &Configuration, goal: &Configuration) -> String {
    let mut objects: Vec<&String> = init.towers.iter().flatten().collect();
    objects.sort();
    let objects: Vec<&str> = objects.iter().map(|s| s.as_str()).collect();
    format!(
        "(define (problem {name})\n  (:domain blocks)\n  (:objects {})\n  (:init {})\n  (:goal (and {})))\n",
        objects.join(" "),
        init.state_atoms().join(" "),
        goal.on_atoms().join(" ")
    )
}

/// A random `n`-block problem. For `n >= 2` the goal has at least one `on` atom.
pub fn random_problem<R: Rng + ?Sized>(name: &str, n: usize, rng: &mut R) -> String {
    let blocks = block_names(n);
    let init = Configuration::random(&blocks, rng);
    let mut goal = Configuration::random(&blocks, rng);
    while n >= 2 && goal.on_atoms().is_empty() {
        goal = Configuration::random(&blocks, rng);
    }
    problem_text(name, &init, &goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_problems_parse() {
        let d = parse_domain(DOMAIN).unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        for n in 1..=6 {
            let text = random_problem(&format!("r{n}"), n, &mut rng);
            let p = parse_problem(&text, &d).unwrap();
            assert_eq!(p.objects.len(), n);
            // one handempty, one ontable + clear per tower, one on per stacked block
            let towers = p.init.iter().filter(|a| a.predicate == "ontable").count();
            assert_eq!(p.init.len(), 1 + 2 * towers + (n - towers));
            if n >= 2 {
                assert!(!p.goal.is_empty());
            }
        }
    }
}
