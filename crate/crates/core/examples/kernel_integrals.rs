//! The kernel integrals I, J, S against d, and the weak-equivalence constants.
//!
//!     cargo run --example kernel_integrals

use otelbaev::coefficient::catalog;
use otelbaev::equivalence::verify_thm33;
use otelbaev::grid::linspace;
use otelbaev::kernel::kernel_row;
use otelbaev::QuadratureConfig;

fn main() -> otelbaev::Result<()> {
    let cfg = QuadratureConfig::default();
    let q = catalog::example2();
    for x in [-5.0, -1.0, 0.0, 1.0, 5.0] {
        let r = kernel_row(&q, x, &cfg)?;
        println!("x = {x:>4}: d = {:.6}, J/d = {:.4}, I/d = {:.4}, S/d = {:.4}", r.d, r.j_over_d, r.i_over_d, r.s_over_d);
    }
    let report = verify_thm33(&q, &linspace(-20.0, 20.0, 201), &cfg)?;
    let (j, i, s) = report.constants();
    println!("weak-equivalence constants: J {j:.4}, I {i:.4}, S {s:.4}; passed = {}", report.passed());
    Ok(())
}
