//! Half-axis coverings by intervals [x - d(x), x + d(x)].
//!
//!     cargo run --example covering

use otelbaev::coefficient::catalog;
use otelbaev::covering::{bd_mass_bound, d_covering, verify_covering, Stop};
use otelbaev::grid::linspace;
use otelbaev::kclass::{estimate_ab, T_GRID_N};
use otelbaev::Direction;

fn main() -> otelbaev::Result<()> {
    let q = catalog::example2();
    for direction in [Direction::Forward, Direction::Backward] {
        let cov = d_covering(&q, 1.0, 0.0, direction, Stop::Cells(12))?;
        let report = verify_covering(&cov, Some(&q))?;
        println!("{direction:?}: {} cells reaching {:.6}, passed = {}", report.cells, cov.reach(), report.passed);
        for (n, cell) in cov.cells.iter().enumerate().take(4) {
            println!("  {n:>2}: [{:.6}, {:.6}] around {:.6}", cell.minus, cell.plus, cell.center);
        }
    }
    let far = linspace(10.0, 50.0, 41);
    let ab = estimate_ab(&q, 10.0, 2.0, &far, T_GRID_N)?;
    let bound = bd_mass_bound(&q, 2.0, ab.max(1.0), &far)?;
    println!("max mass of R(x, 2d) on [10, 50] = {:.6} <= 2(ab + 1) = {:.4}: {}", bound.max_mass, bound.bound, bound.holds);
    Ok(())
}
