//! Acceptance criteria: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are shown on every run.

use kdsqnm::verify::{run_all, DEFAULT_SEED};

fn main() {
    let outcomes = run_all(DEFAULT_SEED);
    println!();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("\nacceptance: {} passed, {} failed", outcomes.len() - failed.len(), failed.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
