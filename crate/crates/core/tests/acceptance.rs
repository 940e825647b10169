//! Acceptance criteria at full resolution, one report line per criterion.
//!
//! Runs without the test harness so the report is printed on every `cargo test`.

use absorbing_walk::verify::{run_criterion, Level, VerifyOptions, CRITERIA};

/// Tolerances per criterion, pinned here so a change in the library cannot loosen them.
const PINNED: [(u8, &[f64]); 11] = [
    (1, &[1e-8]),
    (2, &[1e-10]),
    (3, &[1e-12]),
    (4, &[5e-3, 1.0]),
    (5, &[0.01, 0.01]),
    (6, &[1e-6]),
    (7, &[4.0 * f64::EPSILON, 4.0 * f64::EPSILON, 4.0 * f64::EPSILON]),
    (8, &[1e-12, 1e-8, 1e-8, 1e-12, 1e-12]),
    (9, &[1e-12, 1e-10]),
    (10, &[1e-12, 1e-12]),
    (11, &[1e-4, 1e-8, 1e-8]),
];

fn main() {
    let opts = VerifyOptions::new(Level::Full);
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let report = run_criterion(id, &opts);
        println!("{report}");
        let pinned = PINNED.iter().find(|(i, _)| *i == id).unwrap().1;
        if report.error.is_none() {
            let used: Vec<f64> = report.checks.iter().map(|c| c.tolerance).collect();
            assert_eq!(used, pinned, "criterion {id} tolerances drifted");
        }
        if !report.passed() {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", CRITERIA.len());
}
