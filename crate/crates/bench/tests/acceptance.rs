//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are evaluated and reported like
//! the others but do not fail the run; any other failure does.

use hmclab_bench::checks::{all, KNOWN_UNATTAINABLE};

fn main() {
    let mut unexpected = Vec::new();
    for check in all() {
        let line = check();
        let note = if !line.pass && KNOWN_UNATTAINABLE.contains(&line.id) { " [known unattainable]" } else { "" };
        println!("{line}{note}");
        if !line.pass && note.is_empty() {
            unexpected.push(line.id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria outside the known-unattainable set pass");
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        std::process::exit(1);
    }
}
