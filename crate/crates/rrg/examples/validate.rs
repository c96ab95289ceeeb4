//! Run acceptance criteria through the library.
//!
//! cargo run --release --example validate -- 1 7

use rrg::harness::{run_criterion, CriterionOutcome};

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { vec![1, 7] } else { ids };
    let outcomes: Vec<CriterionOutcome> = ids.iter().map(|&id| run_criterion(id, 1)).collect();
    for o in &outcomes {
        println!("{}", o.summary_line());
        for r in o.reports.iter().take(5) {
            println!("    {:<40} est {:>12.6} ref {:>12.6} {}", r.name, r.estimate, r.reference, if r.pass { "ok" } else { "FAIL" });
        }
    }
}
