//! Property tests of the structural invariants.

use otelbaev::average::d_of_x;
use otelbaev::coefficient::catalog;
use otelbaev::covering::{d_covering, verify_covering, Stop};
use otelbaev::equivalence::{weak_equiv_constant, weak_equiv_from_samples};
use otelbaev::kclass::gamma_of_ab;
use otelbaev::kernel::{Forcing, GreenSolution};
use otelbaev::{Direction, QuadratureConfig};
use proptest::prelude::*;

fn coefficient(k: usize) -> otelbaev::CoefficientFunction {
    match k {
        0 => catalog::square(),
        1 => catalog::example1(0.3, 0.4).unwrap(),
        _ => catalog::example2(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weak_equivalence_is_symmetric_and_scale_free(
        phi in prop::collection::vec(0.01f64..100.0, 2..20),
        lambda in 0.001f64..1000.0,
    ) {
        let grid: Vec<f64> = (0..phi.len()).map(|i| i as f64).collect();
        let psi: Vec<f64> = phi.iter().rev().copied().collect();
        let c = weak_equiv_from_samples(&grid, &phi, &psi).unwrap().c_estimate;
        let swapped = weak_equiv_from_samples(&grid, &psi, &phi).unwrap().c_estimate;
        let sphi: Vec<f64> = phi.iter().map(|v| v * lambda).collect();
        let spsi: Vec<f64> = psi.iter().map(|v| v * lambda).collect();
        let scaled = weak_equiv_from_samples(&grid, &sphi, &spsi).unwrap().c_estimate;
        prop_assert!(c >= 1.0);
        prop_assert!((c - swapped).abs() <= 1e-12 * c);
        prop_assert!((c - scaled).abs() <= 1e-9 * c);
    }

    #[test]
    fn weak_equivalence_of_a_function_with_itself_is_one(lo in -10.0f64..0.0, hi in 0.1f64..10.0) {
        let grid = otelbaev::grid::linspace(lo, hi, 11);
        let c = weak_equiv_constant(|x| Ok(1.0 + x * x), |x| Ok(1.0 + x * x), &grid).unwrap().c_estimate;
        prop_assert_eq!(c, 1.0);
    }

    #[test]
    fn d_is_one_lipschitz(k in 0usize..3, x in -30.0f64..30.0, h in -2.0f64..2.0) {
        let q = coefficient(k);
        let dx = d_of_x(&q, x, 1e-12).unwrap().d;
        let dt = d_of_x(&q, x + h, 1e-12).unwrap().d;
        prop_assert!((dx - dt).abs() <= h.abs() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn d_at_most_doubles_inside_its_interval(k in 0usize..3, x in -30.0f64..30.0, s in -1.0f64..1.0) {
        let q = coefficient(k);
        let dx = d_of_x(&q, x, 1e-12).unwrap().d;
        let dt = d_of_x(&q, x + s * dx, 1e-12).unwrap().d;
        prop_assert!(dt <= 2.0 * dx * (1.0 + 1e-9));
    }

    #[test]
    fn d_interval_carries_mass_two(k in 0usize..3, x in -50.0f64..50.0) {
        let q = coefficient(k);
        let d = d_of_x(&q, x, 1e-12).unwrap().d;
        let mass = q.integrate(x - d, x + d).unwrap();
        prop_assert!((mass - 2.0).abs() < 1e-9);
        prop_assert!(q.integrate(x - 0.99 * d, x + 0.99 * d).unwrap() < 2.0);
    }

    #[test]
    fn integral_is_additive(k in 0usize..3, a in -40.0f64..40.0, u in 0.0f64..10.0, v in 0.0f64..10.0) {
        let q = coefficient(k);
        let (b, c) = (a + u, a + u + v);
        let whole = q.integrate(a, c).unwrap();
        let parts = q.integrate(a, b).unwrap() + q.integrate(b, c).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-10 * whole.abs().max(1.0));
    }

    #[test]
    fn small_b_never_reaches_gamma_threshold(a in 1.0f64..1000.0, b in 1e-9f64..1.0) {
        prop_assert!(gamma_of_ab(a, b).unwrap() > (-1.0f64).exp());
    }

    #[test]
    fn example1_decomposition_is_consistent(alpha in 0.05f64..0.49, extra in 0.01f64..0.6, x in -200.0f64..200.0) {
        let beta = 0.5 - alpha + extra;
        let q = catalog::example1(alpha, beta).unwrap();
        let dec = q.decomposition().unwrap();
        let v = q.eval(x);
        prop_assert!(v >= 0.0);
        prop_assert!((dec.smooth.eval(x) + dec.remainder(x) - v).abs() <= 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn coverings_chain(k in 0usize..3, start in -20.0f64..20.0, forward in any::<bool>(), cells in 1usize..20) {
        let q = coefficient(k);
        let dir = if forward { Direction::Forward } else { Direction::Backward };
        let cov = d_covering(&q, 1.0, start, dir, Stop::Cells(cells)).unwrap();
        let report = verify_covering(&cov, Some(&q)).unwrap();
        prop_assert_eq!(report.cells, cells);
        prop_assert!(report.passed, "{:?}", report);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn green_operator_is_linear_and_positive(center in -3.0f64..3.0, lambda in -5.0f64..5.0, x in -4.0f64..4.0) {
        let q = catalog::example2();
        let cfg = QuadratureConfig::default();
        let f = Forcing::gaussian(center);
        let g = f.scaled(lambda);
        let y = GreenSolution::new(&q, &f, &cfg).unwrap().eval(x).unwrap();
        let yl = GreenSolution::new(&q, &g, &cfg).unwrap().eval(x).unwrap();
        prop_assert!(y >= 0.0);
        prop_assert!((yl - lambda * y).abs() <= 1e-9 * (1.0 + (lambda * y).abs()));
    }
}
