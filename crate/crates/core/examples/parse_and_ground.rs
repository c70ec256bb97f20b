//! Parse a domain and problem, then list the ground actions.
//!
//! cargo run --example parse_and_ground [domain.pddl problem.pddl]

use std::env;
use std::fs;

use pddl_engine::{ground, parse_domain, parse_problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = env::args().skip(1).collect();
    let (domain_text, problem_text) = match args.as_slice() {
        [d, p] => (fs::read_to_string(d)?, fs::read_to_string(p)?),
        _ => (
            pddl_engine::blocksworld::DOMAIN.to_string(),
            include_str!("../data/blocksworld/sussman.pddl").to_string(),
        ),
    };

    let domain = parse_domain(&domain_text)?;
    let problem = parse_problem(&problem_text, &domain)?;
    println!("domain {} with {} action schemas", domain.name, domain.actions.len());
    println!("problem {}: {} objects, {} init atoms", problem.name, problem.objects.len(), problem.init.len());

    let actions = ground(&domain, &problem);
    println!("{} ground actions", actions.len());
    for a in actions.iter().take(8) {
        let pre: Vec<String> = a.pre_pos.iter().map(ToString::to_string).collect();
        println!("  {:<18} pre {}", a.signature.to_string(), pre.join(" "));
    }
    if actions.len() > 8 {
        println!("  ...");
    }

    // Parsing is canonicalising: printing and re-reading gives the same problem.
    assert_eq!(parse_problem(&problem.to_string(), &domain)?, problem);
    Ok(())
}
