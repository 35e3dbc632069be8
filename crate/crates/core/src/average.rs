//! The averaging half-width `d(x)`, its reciprocal `q*(x)`, Steklov means,
//! and the window-indexed solvability functionals `q₀(a)` and `d₀`.

use serde::Serialize;

use crate::coefficient::CoefficientFunction;
use crate::error::{Error, Result};
use crate::grid::{linspace, sweep};
use crate::quadrature::{walk_tail, Direction, Exponent, QuadratureConfig, Walk};

/// Default relative bracket width for [`d_of_x`].
pub const DEFAULT_D_TOL: f64 = 1e-12;

/// Bracket expansion stops here: `2^40`.
pub const D_HORIZON: f64 = 1_099_511_627_776.0;

/// The result of solving `∫_{x-d}^{x+d} q = 2` for the smallest `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DValue {
    pub x: f64,
    pub d: f64,
    /// `|∫_{x-d}^{x+d} q - 2|` at the returned `d`.
    pub residual: f64,
    /// Final bracket: `g(lo) < 2 ≤ g(hi)`.
    pub bracket: (f64, f64),
}

impl DValue {
    pub fn q_star(&self) -> f64 {
        1.0 / self.d
    }
}

/// Smallest `d ≥ 0` with `∫_{x-d}^{x+d} q ≥ 2`.
///
/// The bracket is expanded geometrically from `d = 1` and then bisected on
/// the monotone predicate `g(d) ≥ 2` until its width is at most
/// `tol · hi`. Bisecting the predicate (rather than root-finding `g - 2`)
/// lands on the infimum even when `g = 2` on a whole interval.
pub fn d_of_x(q: &CoefficientFunction, x: f64, tol: f64) -> Result<DValue> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("d tolerance must be positive, got {tol}")));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    let mass = |h: f64| q.integrate(x - h, x + h);

    let mut hi = 1.0;
    let mut lo;
    if mass(hi)? >= 2.0 {
        lo = 0.5;
        while mass(lo)? >= 2.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                lo = 0.0;
                break;
            }
        }
    } else {
        loop {
            lo = hi;
            hi *= 2.0;
            let g = mass(hi)?;
            if g >= 2.0 {
                break;
            }
            if hi >= D_HORIZON {
                return Err(Error::InsufficientMass { x, horizon: hi, mass: g });
            }
        }
    }

    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid)? >= 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    let residual = (mass(d)? - 2.0).abs();
    Ok(DValue { x, d, residual, bracket: (lo, hi) })
}

/// [`d_of_x`] at [`DEFAULT_D_TOL`].
pub fn d(q: &CoefficientFunction, x: f64) -> Result<f64> {
    Ok(d_of_x(q, x, DEFAULT_D_TOL)?.d)
}

/// `q*(x) = 1 / d(x)`.
pub fn q_star(q: &CoefficientFunction, x: f64) -> Result<f64> {
    Ok(1.0 / d(q, x)?)
}

/// Steklov mean `Q(x, h) = (1/2h) ∫_{x-h}^{x+h} q`.
pub fn steklov_average(q: &CoefficientFunction, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("Steklov step must be positive, got {h}")));
    }
    Ok(q.integrate(x - h, x + h)? / (2.0 * h))
}

/// `min_x ∫_{x-a}^{x+a} q` over `grid_n` equispaced `x ∈ [-window, window]`.
///
/// The window minimum is an upper bound for the infimum over ℝ.
pub fn q0_estimate(q: &CoefficientFunction, a: f64, window: f64, grid_n: usize) -> Result<f64> {
    if !(a > 0.0) || !(window > 0.0) || grid_n < 3 {
        return Err(Error::domain(format!(
            "q0 needs a > 0, window > 0, grid_n >= 3 (got a = {a}, window = {window}, grid_n = {grid_n})"
        )));
    }
    let xs = linspace(-window, window, grid_n);
    let masses = sweep(&xs, |x| q.integrate(x - a, x + a))?;
    Ok(masses.into_iter().fold(f64::INFINITY, f64::min))
}

/// `max d(x)` over `grid_n` equispaced `x ∈ [-window, window]`; a lower
/// bound for `d₀ = sup d`.
pub fn d0_estimate(q: &CoefficientFunction, window: f64, grid_n: usize) -> Result<f64> {
    if !(window > 0.0) || grid_n < 3 {
        return Err(Error::domain(format!(
            "d0 needs window > 0 and grid_n >= 3 (got window = {window}, grid_n = {grid_n})"
        )));
    }
    let xs = linspace(-window, window, grid_n);
    let ds = sweep(&xs, |x| d(q, x))?;
    Ok(ds.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CorrectlySolvable,
    Case1D0Infinite,
    Case2IntegralFinite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Q0Sample {
    pub a: f64,
    pub window: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct D0Sample {
    pub window: f64,
    pub sup_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub q0_samples: Vec<Q0Sample>,
    pub d0_samples: Vec<D0Sample>,
    /// Whether `∫ q` along `(−∞, 0]` and `[0, ∞)` looks infinite.
    pub mass_infinite: (bool, bool),
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// `q₀` samples that keep at least this fraction between windows count as stable.
const Q0_STABLE_RATIO: f64 = 0.9;
/// `q₀` below this is treated as vanishing.
const Q0_FLOOR: f64 = 1e-3;

struct HalfMass<'a> {
    q: &'a CoefficientFunction,
}

impl Exponent for HalfMass<'_> {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.q.integrate_signed(0.0, t)?.abs())
    }

    fn increment(&self, from: f64, to: f64) -> Result<f64> {
        Ok(self.q.integrate_signed(from, to)?.abs())
    }
}

/// Whether `∫ e^{-∫₀ᵗ q}` along `direction` reaches the cutoff, i.e. the
/// one-sided mass of `q` looks infinite.
pub fn one_sided_mass_infinite(q: &CoefficientFunction, direction: Direction, cfg: &QuadratureConfig) -> Result<bool> {
    let walk = Walk {
        start: 0.0,
        direction,
        initial_step: 1.0,
        stop_at: None,
        breakpoints: &[],
    };
    match walk_tail(&HalfMass { q }, |_| Ok(1.0), &walk, cfg) {
        Ok(_) => Ok(true),
        Err(e) if e.is_divergence_suspect() => Ok(false),
        Err(e) => Err(e),
    }
}

/// Window-indexed diagnosis of correct solvability in `L_p`.
///
/// * both one-sided masses finite → `Case2IntegralFinite`;
/// * the smallest-`a`, largest-window `q₀` samples are stable and above a
///   floor → `CorrectlySolvable`;
/// * `q₀` decays with the window while the sampled `sup d` grows →
///   `Case1D0Infinite`;
/// * anything else → `Inconclusive`.
pub fn solvability_report(q: &CoefficientFunction, a_list: &[f64], windows: &[f64]) -> Result<SolvabilityReport> {
    if a_list.is_empty() || windows.is_empty() {
        return Err(Error::domain("solvability report needs nonempty a_list and windows"));
    }
    let cfg = QuadratureConfig::default().with_horizon(1e6);
    let mut notes = Vec::new();
    let forward = one_sided_mass_infinite(q, Direction::Forward, &cfg)?;
    let backward = one_sided_mass_infinite(q, Direction::Backward, &cfg)?;

    if !forward && !backward {
        notes.push("both one-sided masses stay below the cutoff: total integral looks finite".into());
        return Ok(SolvabilityReport {
            q0_samples: Vec::new(),
            d0_samples: Vec::new(),
            mass_infinite: (backward, forward),
            verdict: Verdict::Case2IntegralFinite,
            notes,
        });
    }

    let mut windows = windows.to_vec();
    windows.sort_by(f64::total_cmp);
    let grid_n = |w: f64| ((20.0 * w).ceil() as usize + 1).clamp(201, 4001);

    let mut q0_samples = Vec::new();
    for &a in a_list {
        for &w in &windows {
            q0_samples.push(Q0Sample { a, window: w, value: q0_estimate(q, a, w, grid_n(w))? });
        }
    }
    let mut d0_samples = Vec::new();
    let mut d_failed = false;
    for &w in &windows {
        match d0_estimate(q, w, grid_n(w)) {
            Ok(sup_d) => d0_samples.push(D0Sample { window: w, sup_d }),
            Err(e @ Error::InsufficientMass { .. }) => {
                notes.push(format!("d undefined on window {w}: {e}"));
                d_failed = true;
            }
            Err(e) => return Err(e),
        }
    }

    let verdict = if forward != backward {
        notes.push("exactly one one-sided mass looks finite".into());
        Verdict::Inconclusive
    } else if d_failed {
        Verdict::Inconclusive
    } else {
        // Judge on every a: stable if any a gives a stable positive floor.
        let mut stable = false;
        let mut decaying = true;
        for &a in a_list {
            let series: Vec<f64> = q0_samples.iter().filter(|s| s.a == a).map(|s| s.value).collect();
            let first = series[0];
            let last = *series.last().unwrap();
            let prev = if series.len() > 1 { series[series.len() - 2] } else { first };
            if last >= Q0_FLOOR && last >= Q0_STABLE_RATIO * prev {
                stable = true;
            }
            if !(series.len() > 1 && last < Q0_STABLE_RATIO * first) {
                decaying = false;
            }
        }
        let d_growing = d0_samples.len() > 1 && d0_samples.last().unwrap().sup_d > d0_samples[0].sup_d;
        if stable && !decaying {
            Verdict::CorrectlySolvable
        } else if decaying && d_growing {
            Verdict::Case1D0Infinite
        } else {
            Verdict::Inconclusive
        }
    };

    Ok(SolvabilityReport {
        q0_samples,
        d0_samples,
        mass_infinite: (backward, forward),
        verdict,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::catalog::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_coefficient_has_unit_half_width() {
        let q = constant(1.0).unwrap();
        for x in [-3.0, 0.0, 7.0, 123.4] {
            let dv = d_of_x(&q, x, DEFAULT_D_TOL).unwrap();
            assert_abs_diff_eq!(dv.d, 1.0, epsilon = 1e-10);
            assert!(dv.residual < 1e-10);
            assert!(dv.bracket.0 <= dv.d && dv.d <= dv.bracket.1);
        }
    }

    #[test]
    fn square_at_origin_is_cube_root_of_three() {
        let dv = d_of_x(&square(), 0.0, DEFAULT_D_TOL).unwrap();
        assert_abs_diff_eq!(dv.d, 3f64.cbrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(dv.d, 1.442_250, epsilon = 1e-6);
    }

    #[test]
    fn example2_half_width_at_ten() {
        let dv = d_of_x(&example2(), 10.0, DEFAULT_D_TOL).unwrap();
        let scaled = dv.d * 301.0;
        assert!((0.5..=1.5).contains(&scaled), "{scaled}");
    }

    #[test]
    fn vanishing_interval_returns_infimum() {
        // q = 0 on [-1, 1], 1 outside: g(d) = 2(d-1) for d > 1, so d(0) = 2.
        let q = CoefficientFunction::new("gap", |t: f64| if t.abs() <= 1.0 { 0.0 } else { 1.0 });
        let dv = d_of_x(&q, 0.0, DEFAULT_D_TOL).unwrap();
        assert_abs_diff_eq!(dv.d, 2.0, epsilon = 1e-10);
        // Flat level set: g = 2 on [0.5, 1.5] for a plateau of mass exactly 2.
        let q = CoefficientFunction::new("plateau", |t: f64| {
            let a = t.abs();
            if a <= 0.5 {
                2.0
            } else if a <= 1.5 {
                0.0
            } else {
                1.0
            }
        });
        let dv = d_of_x(&q, 0.0, DEFAULT_D_TOL).unwrap();
        assert_abs_diff_eq!(dv.d, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn insufficient_mass_is_reported() {
        let q = CoefficientFunction::new("gauss", |t: f64| (-t * t).exp());
        assert!(matches!(d_of_x(&q, 0.0, DEFAULT_D_TOL), Err(Error::InsufficientMass { .. })));
        assert!(d_of_x(&q, 0.0, 0.0).is_err());
    }

    #[test]
    fn steklov_average_cases() {
        let one = constant(1.0).unwrap();
        assert_abs_diff_eq!(steklov_average(&one, 4.0, 3.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(steklov_average(&square(), 0.0, 1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        assert!(steklov_average(&one, 0.0, 0.0).is_err());
        let q = example2();
        let dv = d_of_x(&q, 5.0, DEFAULT_D_TOL).unwrap();
        assert_abs_diff_eq!(steklov_average(&q, 5.0, dv.d).unwrap(), dv.q_star(), epsilon = 1e-9 * dv.q_star());
    }

    #[test]
    fn q0_and_d0_estimates() {
        let one = constant(1.0).unwrap();
        assert_abs_diff_eq!(q0_estimate(&one, 0.7, 5.0, 11).unwrap(), 1.4, epsilon = 1e-12);
        assert_abs_diff_eq!(q0_estimate(&square(), 1.0, 5.0, 11).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d0_estimate(&one, 5.0, 11).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d0_estimate(&square(), 10.0, 201).unwrap(), 3f64.cbrt(), epsilon = 1e-10);
        assert!(q0_estimate(&one, 0.0, 5.0, 11).is_err());
        assert!(q0_estimate(&one, 1.0, 5.0, 2).is_err());
    }

    #[test]
    fn example1_q0_decays_and_d0_grows() {
        let q = example1(0.3, 0.4).unwrap();
        let near = q0_estimate(&q, 1.0, 10.0, 201).unwrap();
        let far = q0_estimate(&q, 1.0, 100.0, 2001).unwrap();
        assert!(far < near, "{far} vs {near}");
        assert!(d0_estimate(&q, 100.0, 401).unwrap() > d0_estimate(&q, 10.0, 41).unwrap());
    }

    #[test]
    fn solvability_verdicts() {
        let one = constant(1.0).unwrap();
        let r = solvability_report(&one, &[0.5, 1.0], &[10.0, 50.0]).unwrap();
        assert_eq!(r.verdict, Verdict::CorrectlySolvable);

        let q = example1(0.3, 0.4).unwrap();
        let r = solvability_report(&q, &[1.0], &[10.0, 100.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Case1D0Infinite, "{r:?}");

        let g = CoefficientFunction::new("gauss", |t: f64| (-t * t).exp());
        let r = solvability_report(&g, &[1.0], &[10.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Case2IntegralFinite);

        assert!(solvability_report(&one, &[], &[1.0]).is_err());
    }
}
