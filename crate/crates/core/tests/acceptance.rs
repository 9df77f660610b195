//! Runs every acceptance suite and prints one line per criterion.

use boolcomp::verify::{run_suite, Suite};

#[test]
fn acceptance_criteria() {
    let mut failed = vec![];
    for suite in Suite::ALL {
        let r = run_suite(suite).unwrap_or_else(|e| panic!("{suite}: {e}"));
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {status} [{suite}] {} ({} checks, {} ms)",
            r.criterion, r.title, r.checks, r.elapsed_ms
        );
        for n in &r.notes {
            println!(
                "    {} {}: {}",
                if n.passed { "ok " } else { "BAD" },
                n.name,
                n.detail
            );
        }
        if let Some(f) = r.first_failure() {
            println!("    first failure: {}: {}", f.name, f.detail);
            failed.push(r.criterion);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
