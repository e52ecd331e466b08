use std::io::Write;

use oscillab::verify::{run_criterion, DEFAULT_SEED, NAMES};

/// Writes through the raw handle so the lines survive libtest output capture.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let only: Option<usize> = std::env::var("OSCILLAB_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failed = Vec::new();
    for id in 1..=NAMES.len() {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let report = run_criterion(id, DEFAULT_SEED);
        emit(&report.line());
        if !report.passed {
            failed.push(id);
        }
    }
    emit(&format!("acceptance: {} of {} criteria failed {:?}", failed.len(), NAMES.len(), failed));
}
