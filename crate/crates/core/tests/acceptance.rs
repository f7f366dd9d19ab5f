//! Acceptance criteria 1 to 12, run one after another so the timed ones see
//! the whole machine. Pass criterion numbers as arguments to run a subset:
//! `cargo test --test acceptance -- 3 4`.

use std::process::ExitCode;

use edlab::acceptance::run_criterion;

/// Criteria with a documented shortfall: reported, but not fatal.
const KNOWN_RED: [u8; 2] = [3, 4];

fn main() -> ExitCode {
    let picked: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u8> = (1..=12).filter(|id| picked.is_empty() || picked.contains(id)).collect();
    let mut reports = Vec::new();
    for id in ids {
        let report = run_criterion(id);
        print!("{report}");
        reports.push(report);
    }
    println!();
    let mut fatal = false;
    for r in &reports {
        println!("{}", r.summary_line());
        let unevaluated = r.checks.iter().any(|c| c.name == "evaluation");
        if unevaluated || (!r.passed && !KNOWN_RED.contains(&r.id)) {
            fatal = true;
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed} of {} criteria passed", reports.len());
    if fatal {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
