//! Acceptance suite: every criterion at full instance counts, exact
//! arithmetic (entropies within 1e-12). Prints one PASS/FAIL line each.

use probalg::selftest::{render, run_all, Config};

#[test]
fn acceptance() {
    let results = run_all(&Config::default());
    print!("{}", render(&results, true));
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    assert_eq!(results.len(), 12);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
