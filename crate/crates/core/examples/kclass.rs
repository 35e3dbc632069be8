//! kappa1, kappa2 and the empirical (a, b, gamma) for the oscillating coefficient.
//!
//!     cargo run --example kclass

use otelbaev::coefficient::catalog;
use otelbaev::grid::linspace;
use otelbaev::kclass::membership_report;

fn main() -> otelbaev::Result<()> {
    for q in [catalog::example2(), catalog::example1(0.3, 0.4)?] {
        let report = membership_report(&q, 10.0, &linspace(-60.0, 60.0, 13))?;
        println!("{}: a = {:.4}, b = {}, gamma = {:.4}, verdict = {:?}", q.label(), report.a, report.b, report.gamma, report.verdict);
        for row in report.rows.iter().filter(|r| r.x.abs() >= 10.0) {
            println!(
                "  x = {:>5}: kappa1 = {:.3e}, kappa2 = {:.3e}, q1 d - 1 = {:+.3e}",
                row.x, row.kappa1, row.kappa2, row.epsilon
            );
        }
        for t in &report.trends {
            println!("  trend {}: {}", t.name, if t.holds { "holds" } else { "fails" });
        }
    }
    Ok(())
}
