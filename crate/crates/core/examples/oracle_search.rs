//! Compare optimal breadth-first search with greedy goal-count search on
//! random Blocksworld instances.
//!
//! cargo run --release --example oracle_search [max_blocks]

use pddl_engine::blocksworld::{random_problem, DOMAIN};
use pddl_engine::oracle::DEFAULT_NODE_BUDGET;
use pddl_engine::{parse_domain, parse_problem, solve_greedy, solve_optimal, Task};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_blocks: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5);
    let domain = parse_domain(DOMAIN)?;
    let mut rng = StdRng::seed_from_u64(42);
    println!("{:>6} {:>8} {:>8} {:>10} {:>10}", "blocks", "optimal", "greedy", "bfs nodes", "gbfs nodes");
    for n in 2..=max_blocks {
        for _ in 0..3 {
            let problem = parse_problem(&random_problem("r", n, &mut rng), &domain)?;
            let task = Task::new(domain.clone(), problem);
            let opt = solve_optimal(&task, DEFAULT_NODE_BUDGET);
            let gr = solve_greedy(&task, DEFAULT_NODE_BUDGET);
            let len = |p: &Option<Vec<_>>| p.as_ref().map_or("-".to_string(), |p| p.len().to_string());
            println!(
                "{n:>6} {:>8} {:>8} {:>10} {:>10}",
                len(&opt.plan),
                len(&gr.plan),
                opt.nodes_expanded,
                gr.nodes_expanded
            );
        }
    }
    Ok(())
}
