//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Criteria listed as known-unattainable may fail; anything else must pass.

use trapfpt_cli::acceptance::{Suite, CRITERIA};

fn main() {
    let mut suite = Suite::new();
    let mut unexpected = Vec::new();
    for (id, _) in CRITERIA {
        let outcome = suite.run(id);
        println!("{}", outcome.line());
        match (outcome.passed, outcome.known_unattainable()) {
            (true, Some(_)) => println!("      note: criterion {id} passed although listed as unattainable"),
            (false, Some(reason)) => println!("      known: {reason}"),
            (false, None) => unexpected.push(id),
            (true, None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
