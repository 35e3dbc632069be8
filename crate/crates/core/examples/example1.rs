//! The slowly decaying oscillating coefficient (1 + cos((1+x^2)^beta)) / (1+x^2)^alpha.
//!
//!     cargo run --example example1 [alpha] [beta]

use otelbaev::equivalence::verify_example1;
use otelbaev::grid::{grid, Spacing};
use otelbaev::QuadratureConfig;

fn main() -> otelbaev::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let alpha = args.next().unwrap_or(0.3);
    let beta = args.next().unwrap_or(0.4);
    let report = verify_example1(alpha, beta, &grid(100.0, 101, Spacing::Log)?, &QuadratureConfig::oscillatory())?;
    println!("alpha = {alpha}, beta = {beta}, nu = {}", report.nu);
    println!("d / (1+x^2)^alpha within factor {:.4}", report.d_shape.c_estimate);
    println!("deviation from the shape: {:.4} at 10, {:.4} at 100", report.deviation_10, report.deviation_100);
    println!("q0 on windows 10, 100: {:.4}, {:.4}", report.q0_window_10, report.q0_window_100);
    println!("kernel estimates hold: {}; class verdict {:?}", report.thm33.passed(), report.kclass.verdict);
    Ok(())
}
