//! F(x) for unimodal pairs against u v (d1 + d2), and F1 against cosh(x cos x) / (x^2 + 1).
//!
//!     cargo run --example unimodal

use otelbaev::coefficient::UnimodalPair;
use otelbaev::equivalence::{verify_example2, verify_thm35};
use otelbaev::grid::linspace;
use otelbaev::QuadratureConfig;

fn main() -> otelbaev::Result<()> {
    let cfg = QuadratureConfig::default();
    let grid = linspace(-8.0, 8.0, 17);
    for label in ["exp", "cubic", "cubic-sym"] {
        let pair = UnimodalPair::catalog(label)?;
        let report = verify_thm35(&pair, &grid, &cfg)?;
        println!("{label}: F / (u v (d1 + d2)) within factor {:.4}", report.equivalence.c_estimate);
    }
    let report = verify_example2(&linspace(-10.0, 10.0, 21), &cfg)?;
    for row in &report.rows {
        println!("x = {:>5}: F1 = {:.6e}, normalized = {:.4}, sandwich = {}", row.x, row.f1, row.normalized, row.sandwich);
    }
    Ok(())
}
