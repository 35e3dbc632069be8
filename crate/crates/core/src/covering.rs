//! `R(x, κ)` coverings: chains of abutting intervals
//! `Δₙ = [xₙ − κ(xₙ), xₙ + κ(xₙ)]` that tile a half-axis from `x`.

use serde::Serialize;

use crate::average::{d, DEFAULT_D_TOL};
use crate::coefficient::CoefficientFunction;
use crate::error::{Error, Result};
use crate::quadrature::Direction;

/// Label under which [`d_covering`] stores coverings with `κ = d`.
pub const KAPPA_D: &str = "d";

/// Per-cell mass tolerance for `κ = d` coverings.
pub const CELL_MASS_TOL: f64 = 1e-6;

/// One interval of a covering, oriented along the axis (`minus < plus`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub center: f64,
    pub minus: f64,
    pub plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Covering {
    pub direction: Direction,
    pub start: f64,
    /// Ordered outward from `start`.
    pub cells: Vec<Cell>,
    pub kappa_label: String,
    /// `|xₙ ∓ κ(xₙ) − shared endpoint|` per cell, from the center solve.
    pub center_residuals: Vec<f64>,
}

impl Covering {
    /// Wraps hand-built cells without any checking.
    pub fn from_cells(direction: Direction, start: f64, cells: Vec<Cell>, kappa_label: impl Into<String>) -> Self {
        let n = cells.len();
        Self {
            direction,
            start,
            cells,
            kappa_label: kappa_label.into(),
            center_residuals: vec![0.0; n],
        }
    }

    /// Far endpoint of the last cell.
    pub fn reach(&self) -> f64 {
        match (self.cells.last(), self.direction) {
            (Some(c), Direction::Forward) => c.plus,
            (Some(c), Direction::Backward) => c.minus,
            (None, _) => self.start,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Stop {
    Cells(usize),
    /// Continue until the far endpoint passes this point.
    Reach(f64),
}

/// Cap on cells when stopping by reach.
const MAX_CELLS: usize = 1_000_000;
/// Scan steps (of size κ(L)/4) before declaring failure.
const MAX_SCAN: usize = 100_000;

/// Builds an `R(start, κ)` covering of `[start, ∞)` or `(−∞, start]`.
///
/// Each center solves `t − κ(t) = L` (forward; `t + κ(t) = L` backward) for
/// the previous endpoint `L`, taking the smallest solution beyond `L`: a
/// scan with step `κ(L)/4` finds a sign change, bisection finishes it. The
/// new far endpoint is written once and reused as the next cell's near
/// endpoint, so chaining is exact.
pub fn build_covering<K>(kappa: K, kappa_label: &str, start: f64, direction: Direction, stop: Stop) -> Result<Covering>
where
    K: Fn(f64) -> Result<f64>,
{
    let sign = direction.sign();
    let kappa_checked = |t: f64| -> Result<f64> {
        let k = kappa(t)?;
        if k > 0.0 && k.is_finite() {
            Ok(k)
        } else {
            Err(Error::domain(format!("kappa must be positive and finite, got {k} at t = {t}")))
        }
    };
    let mut cells = Vec::new();
    let mut residuals = Vec::new();
    let mut near = start;

    loop {
        match stop {
            Stop::Cells(n) if cells.len() >= n => break,
            Stop::Reach(x) if sign * (near - x) >= 0.0 => break,
            _ => {}
        }
        if cells.len() >= MAX_CELLS {
            return Err(Error::CoveringFailure { cells: cells.len(), endpoint: near });
        }

        // g(t) = sign·(t − near) − κ(t): negative at t = near, we want its first zero.
        let g = |t: f64| -> Result<f64> { Ok(sign * (t - near) - kappa_checked(t)?) };
        let step = 0.25 * kappa_checked(near)?;
        let mut lo = near;
        let mut hi = near;
        let mut found = false;
        for _ in 0..MAX_SCAN {
            hi = lo + sign * step;
            if g(hi)? >= 0.0 {
                found = true;
                break;
            }
            lo = hi;
        }
        if !found {
            return Err(Error::CoveringFailure { cells: cells.len(), endpoint: near });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if g(mid)? >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let center = hi;
        let k = kappa_checked(center)?;
        let far = center + sign * k;
        residuals.push(((center - sign * k) - near).abs());
        cells.push(match direction {
            Direction::Forward => Cell { center, minus: near, plus: far },
            Direction::Backward => Cell { center, minus: far, plus: near },
        });
        near = far;
    }

    Ok(Covering {
        direction,
        start,
        cells,
        kappa_label: kappa_label.to_string(),
        center_residuals: residuals,
    })
}

/// `R(start, b·d)` covering for the coefficient `q`; labelled `"d"` when `b = 1`.
pub fn d_covering(q: &CoefficientFunction, b: f64, start: f64, direction: Direction, stop: Stop) -> Result<Covering> {
    if !(b > 0.0) {
        return Err(Error::domain(format!("covering scale b must be positive, got {b}")));
    }
    let label = if b == 1.0 { KAPPA_D.to_string() } else { format!("{b}*d") };
    build_covering(|t| Ok(b * d(q, t)?), &label, start, direction, stop)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub cells: usize,
    pub start_anchored: bool,
    /// 1-based `n` with `Δₙ⁺ ≠ Δₙ₊₁⁻` (forward) or the mirrored condition.
    pub chaining_violations: Vec<usize>,
    /// 1-based `n` where a cell is empty or does not move outward.
    pub monotonicity_violations: Vec<usize>,
    pub max_center_residual: f64,
    /// `∫_{Δₙ} q` per cell, when checked.
    pub cell_masses: Vec<f64>,
    /// 1-based `n` with `|∫_{Δₙ} q − 2| > CELL_MASS_TOL`.
    pub mass_violations: Vec<usize>,
    pub passed: bool,
}

/// Checks anchoring, exact chaining and outward growth; with `q` given and
/// `κ = d`, also that every cell carries mass 2.
pub fn verify_covering(cov: &Covering, q: Option<&CoefficientFunction>) -> Result<CoveringReport> {
    let forward = cov.direction == Direction::Forward;
    let start_anchored = match cov.cells.first() {
        Some(c) if forward => c.minus == cov.start,
        Some(c) => c.plus == cov.start,
        None => true,
    };
    let mut chaining_violations = Vec::new();
    for (i, w) in cov.cells.windows(2).enumerate() {
        let ok = if forward { w[0].plus == w[1].minus } else { w[0].minus == w[1].plus };
        if !ok {
            chaining_violations.push(i + 1);
        }
    }
    let mut monotonicity_violations = Vec::new();
    for (i, c) in cov.cells.iter().enumerate() {
        let mut ok = c.minus < c.plus && c.minus <= c.center && c.center <= c.plus;
        if i > 0 {
            let prev = &cov.cells[i - 1];
            ok &= if forward { c.plus > prev.plus } else { c.minus < prev.minus };
        }
        if !ok {
            monotonicity_violations.push(i + 1);
        }
    }
    let mut cell_masses = Vec::new();
    let mut mass_violations = Vec::new();
    if let Some(q) = q {
        if cov.kappa_label == KAPPA_D {
            for (i, c) in cov.cells.iter().enumerate() {
                let m = q.integrate(c.minus, c.plus)?;
                if (m - 2.0).abs() > CELL_MASS_TOL {
                    mass_violations.push(i + 1);
                }
                cell_masses.push(m);
            }
        }
    }
    let max_center_residual = cov.center_residuals.iter().copied().fold(0.0, f64::max);
    let passed = start_anchored && chaining_violations.is_empty() && monotonicity_violations.is_empty() && mass_violations.is_empty();
    Ok(CoveringReport {
        cells: cov.cells.len(),
        start_anchored,
        chaining_violations,
        monotonicity_violations,
        max_center_residual,
        cell_masses,
        mass_violations,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdMassReport {
    pub max_mass: f64,
    pub argmax: f64,
    /// `2(ab + 1)`.
    pub bound: f64,
    pub holds: bool,
}

/// `max_x ∫_{x−b·d(x)}^{x+b·d(x)} q` over `x_grid`, against `2(ab + 1)`.
pub fn bd_mass_bound(q: &CoefficientFunction, b: f64, a: f64, x_grid: &[f64]) -> Result<BdMassReport> {
    if !(b > 0.0) || !(a >= 1.0) {
        return Err(Error::domain(format!("bd mass bound needs b > 0 and a >= 1, got b = {b}, a = {a}")));
    }
    let masses = crate::grid::sweep(x_grid, |x| {
        let h = b * crate::average::d_of_x(q, x, DEFAULT_D_TOL)?.d;
        q.integrate(x - h, x + h)
    })?;
    let (argmax, max_mass) = x_grid
        .iter()
        .copied()
        .zip(masses)
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, (x, m)| if m > acc.1 { (x, m) } else { acc });
    let bound = 2.0 * (a * b + 1.0);
    Ok(BdMassReport { max_mass, argmax, bound, holds: max_mass <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::catalog::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_kappa_gives_unit_cells() {
        let cov = build_covering(|_| Ok(1.0), "1", 0.0, Direction::Forward, Stop::Cells(3)).unwrap();
        let centers: Vec<f64> = cov.cells.iter().map(|c| c.center).collect();
        for (c, e) in centers.iter().zip([1.0, 3.0, 5.0]) {
            assert_abs_diff_eq!(*c, e, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(cov.cells[0].plus, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cov.cells[2].plus, 6.0, epsilon = 1e-12);
        assert_eq!(cov.cells[0].minus, 0.0);
        assert!(verify_covering(&cov, None).unwrap().passed);
    }

    #[test]
    fn linear_kappa() {
        let cov = build_covering(|t| Ok(t / 2.0 + 1.0), "t/2+1", 0.0, Direction::Forward, Stop::Cells(2)).unwrap();
        assert_abs_diff_eq!(cov.cells[0].center, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cov.cells[0].plus, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cov.cells[1].center, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cov.cells[1].plus, 16.0, epsilon = 1e-12);
    }

    #[test]
    fn backward_covering_mirrors_forward() {
        let cov = build_covering(|_| Ok(1.0), "1", 0.0, Direction::Backward, Stop::Reach(-7.0)).unwrap();
        assert_eq!(cov.cells[0].plus, 0.0);
        assert!(cov.reach() <= -7.0);
        assert_abs_diff_eq!(cov.cells[1].center, -3.0, epsilon = 1e-12);
        assert!(verify_covering(&cov, None).unwrap().passed);
    }

    #[test]
    fn gap_is_reported_at_its_index() {
        let cells = vec![
            Cell { center: 1.0, minus: 0.0, plus: 2.0 },
            Cell { center: 3.0, minus: 2.0, plus: 4.0 },
            Cell { center: 5.5, minus: 4.5, plus: 6.5 },
        ];
        let cov = Covering::from_cells(Direction::Forward, 0.0, cells, "1");
        let r = verify_covering(&cov, None).unwrap();
        assert_eq!(r.chaining_violations, vec![2]);
        assert!(!r.passed);
    }

    #[test]
    fn d_covering_of_constant() {
        let q = constant(1.0).unwrap();
        let cov = d_covering(&q, 1.0, 0.0, Direction::Forward, Stop::Cells(10)).unwrap();
        for (n, c) in cov.cells.iter().enumerate() {
            assert_abs_diff_eq!(c.minus, 2.0 * n as f64, epsilon = 1e-8);
            assert_abs_diff_eq!(c.plus, 2.0 * (n + 1) as f64, epsilon = 1e-8);
        }
        let r = verify_covering(&cov, Some(&q)).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.cell_masses.len(), 10);
    }

    #[test]
    fn d_covering_of_example2_carries_unit_mass() {
        let q = example2();
        let cov = d_covering(&q, 1.0, 1.0, Direction::Forward, Stop::Cells(40)).unwrap();
        let r = verify_covering(&cov, Some(&q)).unwrap();
        assert!(r.passed, "{r:?}");
        for m in r.cell_masses {
            assert!((m - 2.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn failure_when_kappa_outruns_the_axis() {
        // t − 2t = −t never reaches a positive endpoint.
        let r = build_covering(|t| Ok(2.0 * t.abs() + 1.0), "2|t|+1", 0.0, Direction::Forward, Stop::Cells(3));
        assert!(matches!(r, Err(Error::CoveringFailure { .. })));
    }

    #[test]
    fn bd_mass_bounds() {
        let q = constant(1.0).unwrap();
        let grid = [-2.0, 0.0, 3.0];
        let r = bd_mass_bound(&q, 1.0, 1.0, &grid).unwrap();
        assert_abs_diff_eq!(r.max_mass, 2.0, epsilon = 1e-9);
        assert!(r.holds && r.bound == 4.0);
        let r = bd_mass_bound(&q, 3.0, 1.0, &grid).unwrap();
        assert_abs_diff_eq!(r.max_mass, 6.0, epsilon = 1e-8);
        assert_eq!(r.bound, 8.0);
        assert!(r.holds);
        assert!(bd_mass_bound(&q, 0.0, 1.0, &grid).is_err());
        assert!(bd_mass_bound(&q, 1.0, 0.5, &grid).is_err());
    }
}
