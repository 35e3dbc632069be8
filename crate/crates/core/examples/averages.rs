//! d(x), q*(x) and solvability diagnostics for every catalog coefficient.
//!
//!     cargo run --example averages

use otelbaev::average::{d_of_x, q0_estimate, solvability_report, DEFAULT_D_TOL};
use otelbaev::coefficient::catalog;

fn main() -> otelbaev::Result<()> {
    let coefficients = [catalog::constant(1.0)?, catalog::square(), catalog::example1(0.3, 0.4)?, catalog::example2()];
    for q in &coefficients {
        println!("{}", q.label());
        for x in [-10.0, -1.0, 0.0, 1.0, 10.0] {
            let v = d_of_x(q, x, DEFAULT_D_TOL)?;
            println!("  x = {x:>6}: d = {:.10}, q* = {:.10}, residual = {:.1e}", v.d, v.q_star(), v.residual);
        }
        println!("  q0(1) on [-20, 20] ~ {:.6}", q0_estimate(q, 1.0, 20.0, 401)?);
    }
    let report = solvability_report(&catalog::example2(), &[0.5, 1.0], &[10.0, 20.0])?;
    println!("example2 solvability: {:?}", report.verdict);
    Ok(())
}
