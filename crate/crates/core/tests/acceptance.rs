//! The acceptance battery: one PASS/FAIL line per criterion, run in order.

use std::process::ExitCode;

fn main() -> ExitCode {
    let results = otelbaev::suite::run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
