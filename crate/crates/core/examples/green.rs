//! The Green operator y = Gf, its equation residual and the admissibility ratio.
//!
//!     cargo run --example green

use otelbaev::coefficient::catalog;
use otelbaev::grid::linspace;
use otelbaev::kernel::{
    admissibility_estimate, homogeneous_divergence_check, residual_check, standard_family, Forcing, GreenSolution,
    SpaceParams, Weight,
};
use otelbaev::QuadratureConfig;

fn main() -> otelbaev::Result<()> {
    let cfg = QuadratureConfig::default();
    let q = catalog::example2();
    let f = Forcing::gaussian(0.0);
    let y = GreenSolution::new(&q, &f, &cfg)?;
    for x in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        println!("y({x:>4}) = {:.10}", y.eval(x)?);
    }
    let residual = residual_check(&q, &f, &linspace(-3.0, 3.0, 61), 1e-4)?;
    println!("max |-y' + q y - f| = {:.2e} at x = {}", residual.max_residual, residual.argmax);

    for p in [1.0, 2.0] {
        let sp = SpaceParams::new(p, Weight::QStar(q.clone()))?;
        let report = admissibility_estimate(&q, &sp, &standard_family(), 20.0, &cfg)?;
        println!("p = {p}: sup ||Gf|| / ||f|| over the family = {:.4}", report.c_estimate);
        let z = homogeneous_divergence_check(&q, &sp, 1.0, 0.0, &[3.0, 5.0, 8.0], 1.0)?;
        println!("  homogeneous solution log-norms {:?}, grows = {}", z.log_norms, z.grows);
    }
    Ok(())
}
