//! Runs the acceptance battery and prints one line per criterion.
//!
//!     cargo run --example suite

fn main() {
    let results = otelbaev::suite::run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
}
