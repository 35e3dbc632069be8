//! Values frozen from independent 30-digit evaluations.

use approx::assert_relative_eq;
use otelbaev::average::d_of_x;
use otelbaev::coefficient::catalog;
use otelbaev::equivalence::f1_of_x;
use otelbaev::kernel::{i_of_x, j_of_x, Forcing, GreenSolution};
use otelbaev::QuadratureConfig;

const D_EXAMPLE2: [(f64, f64); 4] = [
    (0.0, 1.1226096912017464948),
    (1.0, 0.42826593237365256276),
    (-2.0, 0.098084665563423442852),
    (10.0, 0.0032739631212282092993),
];

const IJ_EXAMPLE2: [(f64, f64, f64); 3] = [
    (0.0, 1.0011574205189388156, 1.0011574205189388156),
    (1.0, 1.1006395434276242812, 0.2895091264540551091),
    (-2.0, 0.089147007087582137256, 0.11839246597617263103),
];

const F1: [(f64, f64); 3] = [(0.0, 1.273905890897057761), (1.0, 1.1519892970294679813), (2.0, 0.26584480410294492936)];

const GREEN_GAUSS: [(f64, f64); 3] =
    [(0.0, 0.70415293341388925149), (-0.5, 1.0795239514987169419), (2.0, 0.0012139265124037076319)];

const D_EXAMPLE1: [(f64, f64); 2] = [(0.0, 0.70055454494014127492), (10.0, 2.1893772179528894998)];

#[test]
fn d_matches_oracle_for_example2() {
    let q = catalog::example2();
    for (x, d) in D_EXAMPLE2 {
        assert_relative_eq!(d_of_x(&q, x, 1e-13).unwrap().d, d, max_relative = 1e-10);
    }
}

#[test]
fn d_matches_oracle_for_example1() {
    let q = catalog::example1(0.3, 0.4).unwrap();
    for (x, d) in D_EXAMPLE1 {
        assert_relative_eq!(d_of_x(&q, x, 1e-13).unwrap().d, d, max_relative = 1e-10);
    }
}

#[test]
fn kernel_integrals_match_oracle() {
    let q = catalog::example2();
    let cfg = QuadratureConfig::default();
    for (x, i, j) in IJ_EXAMPLE2 {
        assert_relative_eq!(i_of_x(&q, x, &cfg).unwrap(), i, max_relative = 1e-8);
        assert_relative_eq!(j_of_x(&q, x, &cfg).unwrap(), j, max_relative = 1e-8);
    }
}

#[test]
fn f1_matches_oracle() {
    let cfg = QuadratureConfig::default();
    for (x, f) in F1 {
        assert_relative_eq!(f1_of_x(x, &cfg).unwrap(), f, max_relative = 1e-8);
    }
}

#[test]
fn green_solution_matches_oracle() {
    let q = catalog::example2();
    let f = Forcing::gaussian(0.0);
    let cfg = QuadratureConfig::default();
    let y = GreenSolution::new(&q, &f, &cfg).unwrap();
    for (x, v) in GREEN_GAUSS {
        assert_relative_eq!(y.eval(x).unwrap(), v, max_relative = 1e-8);
    }
}

#[test]
fn constant_coefficient_closed_forms() {
    let cfg = QuadratureConfig::default();
    for k in [0.5, 1.0, 4.0] {
        let q = catalog::constant(k).unwrap();
        for x in [-3.0, 0.0, 7.0] {
            assert_relative_eq!(d_of_x(&q, x, 1e-13).unwrap().d, 1.0 / k, max_relative = 1e-10);
            assert_relative_eq!(j_of_x(&q, x, &cfg).unwrap(), 1.0 / k, max_relative = 1e-8);
            assert_relative_eq!(i_of_x(&q, x, &cfg).unwrap(), 1.0 / k, max_relative = 1e-8);
        }
    }
}
