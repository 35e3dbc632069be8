//! Adaptive Gauss–Kronrod quadrature and exponentially truncated tail
//! integrals.
//!
//! Everything above this module reduces to two primitives:
//!
//! * [`integrate_adaptive`]: a globally adaptive 7/15-point Gauss–Kronrod
//!   rule that bisects the subinterval with the largest error estimate.
//! * [`improper_exp_integral`]: `∫ e^{-E(t)} dt` from a start point to
//!   `±∞` for a nondecreasing exponent `E`, walked in panels and truncated
//!   once `E` reaches [`QuadratureConfig::exponent_cutoff`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and limits shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Truncate `∫ e^{-E}` once `E` reaches this value.
    pub exponent_cutoff: f64,
    /// How far a tail walk may travel before giving up.
    pub horizon: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 50,
            exponent_cutoff: 46.0,
            horizon: 1e7,
        }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32, exponent_cutoff: f64) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_depth,
            exponent_cutoff,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Settings for integrands whose oscillation frequency grows along the axis.
    pub fn oscillatory() -> Self {
        Self {
            max_depth: 60,
            ..Self::default()
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.exponent_cutoff = cutoff;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_depth < 10 {
            return Err(Error::domain(format!("max_depth must be at least 10, got {}", self.max_depth)));
        }
        if !(self.exponent_cutoff >= 20.0 && self.exponent_cutoff.is_finite()) {
            return Err(Error::domain(format!(
                "exponent_cutoff must be at least 20, got {}",
                self.exponent_cutoff
            )));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }
}

/// Value and error estimate of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on live subintervals, independent of `max_depth`.
const MAX_SEGMENTS: usize = 20_000;

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn checked<F>(f: &mut F, t: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let v = f(t)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { t, value: v })
    }
}

/// One 15-point Kronrod panel: (value, error, |f| integral).
fn qk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtw = 2 * j;
        let dx = half * XGK[jtw];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs, res_asc);
    Ok((value, err, res_abs))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    res_abs: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Adaptive integration of a fallible integrand over `[a, b]`.
///
/// Non-finite integrand values abort with [`Error::NonFinite`]. The loop
/// stops once the summed error estimate drops below
/// `max(abs_tol, rel_tol·|value|)` or reaches the round-off floor of the
/// 15-point rule.
pub fn try_integrate_adaptive<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("integration bounds must be finite, got [{a}, {b}]")));
    }
    if a > b {
        return Err(Error::domain(format!("integration requires a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }

    let (value, error, res_abs) = qk15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, res_abs, depth: 0 });
    let mut total = value;
    let mut total_err = error;
    let mut total_abs = res_abs;

    loop {
        let tol = cfg
            .abs_tol
            .max(cfg.rel_tol * total.abs())
            .max(50.0 * f64::EPSILON * total_abs);
        if total_err <= tol {
            break;
        }
        let worst = *heap.peek().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= cfg.max_depth || heap.len() >= MAX_SEGMENTS || mid <= worst.a || mid >= worst.b {
            // Sub-ulp segments cannot be refined further; accept round-off.
            if worst.error <= 100.0 * f64::EPSILON * worst.res_abs.max(f64::MIN_POSITIVE) {
                break;
            }
            return Err(Error::Convergence {
                a: worst.a,
                b: worst.b,
                error: worst.error,
            });
        }
        heap.pop();
        let (v1, e1, r1) = qk15(&mut f, worst.a, mid)?;
        let (v2, e2, r2) = qk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += r1 + r2 - worst.res_abs;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, res_abs: r1, depth: worst.depth + 1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, res_abs: r2, depth: worst.depth + 1 });
    }

    // Re-sum left to right so the result does not depend on update order.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum();
    let error = segments.iter().map(|s| s.error).sum();
    Ok(Quadrature { value, error, evaluations })
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    try_integrate_adaptive(|t| Ok(f(t)), a, b, cfg)
}

/// Integrates over `[a, b]` after splitting at the given interior points.
pub fn try_integrate_split<F>(mut f: F, a: f64, b: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut lo = a;
    let mut out = Quadrature { value: 0.0, error: 0.0, evaluations: 0 };
    for hi in points.into_iter().chain(std::iter::once(b)) {
        let piece = try_integrate_adaptive(&mut f, lo, hi, cfg)?;
        out.value += piece.value;
        out.error += piece.error;
        out.evaluations += piece.evaluations;
        lo = hi;
    }
    Ok(out)
}

/// Direction of a half-axis walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    /// Toward `+∞`.
    Forward,
    /// Toward `-∞`.
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// A nondecreasing exponent `E(t)` along a walk, with `E(start) = 0`.
pub trait Exponent {
    fn value(&self, t: f64) -> Result<f64>;

    /// `E(to) - E(from)`; override when it can be computed without
    /// cancellation.
    fn increment(&self, from: f64, to: f64) -> Result<f64> {
        Ok(self.value(to)? - self.value(from)?)
    }
}

/// Adapter turning a closure into an [`Exponent`].
pub struct FnExponent<F>(pub F);

impl<F: Fn(f64) -> f64> Exponent for FnExponent<F> {
    fn value(&self, t: f64) -> Result<f64> {
        let v = (self.0)(t);
        if v.is_nan() {
            Err(Error::NonFinite { t, value: v })
        } else {
            Ok(v)
        }
    }
}

/// Result of a truncated tail integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailIntegral {
    pub value: f64,
    pub error: f64,
    /// Where the walk stopped.
    pub end: f64,
    /// Exponent value at `end`; the neglected tail carries the factor
    /// `e^{-exponent_at_end}`.
    pub exponent_at_end: f64,
    pub panels: usize,
}

/// Panel layout for [`walk_tail`].
#[derive(Debug, Clone)]
pub(crate) struct Walk<'a> {
    pub start: f64,
    pub direction: Direction,
    pub initial_step: f64,
    /// Stop here even if the cutoff has not been reached (end of a support).
    pub stop_at: Option<f64>,
    /// Points at which panels must break (discontinuities of the weight).
    pub breakpoints: &'a [f64],
}

// Panels may raise the exponent by at most this much ...
const MAX_PANEL_RISE: f64 = 4.0;
// ... and are widened when they raise it by less than this.
const MIN_PANEL_RISE: f64 = 1.0;

/// `∫ w(t) e^{-E(t)} dt` along a half-axis, truncated when `E` reaches the
/// cutoff, the walk passes `stop_at`, or (as an error) the horizon.
pub(crate) fn walk_tail<E, W>(exponent: &E, mut weight: W, walk: &Walk<'_>, cfg: &QuadratureConfig) -> Result<TailIntegral>
where
    E: Exponent + ?Sized,
    W: FnMut(f64) -> Result<f64>,
{
    let sign = walk.direction.sign();
    let start = walk.start;
    let beyond = |t: f64, limit: f64| sign * (t - limit) >= 0.0;

    let mut breaks: Vec<f64> = walk
        .breakpoints
        .iter()
        .copied()
        .filter(|&b| sign * (b - start) > 0.0)
        .collect();
    breaks.sort_by(|x, y| (sign * x).total_cmp(&(sign * y)));
    let mut next_break = breaks.into_iter().peekable();

    let mut t = start;
    let mut phi = exponent.value(start)?;
    let mut step = walk.initial_step.abs().max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut panels = 0usize;

    if let Some(stop) = walk.stop_at {
        if beyond(t, stop) {
            return Ok(TailIntegral { value: 0.0, error: 0.0, end: t, exponent_at_end: phi, panels });
        }
    }

    loop {
        while matches!(next_break.peek(), Some(&b) if sign * (b - t) <= 0.0) {
            next_break.next();
        }
        let mut next = t + sign * step;
        let mut clipped = false;
        if let Some(&b) = next_break.peek() {
            if beyond(next, b) {
                next = b;
                clipped = true;
            }
        }
        let mut at_stop = false;
        if let Some(stop) = walk.stop_at {
            if beyond(next, stop) {
                next = stop;
                at_stop = true;
                clipped = true;
            }
        }
        if next == t {
            // Step underflowed relative to |t|.
            step *= 2.0;
            continue;
        }

        let rise = exponent.increment(t, next)?;
        let width = (next - t).abs();
        if rise > MAX_PANEL_RISE && width > 64.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            step = 0.5 * width;
            continue;
        }

        let (lo, hi) = if sign > 0.0 { (t, next) } else { (next, t) };
        let base = phi;
        let anchor = t;
        let panel_cfg = QuadratureConfig {
            abs_tol: cfg.abs_tol * width.min(1.0),
            ..*cfg
        };
        let piece = try_integrate_adaptive(
            |s| {
                let w = weight(s)?;
                if w == 0.0 {
                    return Ok(0.0);
                }
                let local = exponent.increment(anchor, s)?;
                Ok(w * (-(base + local)).exp())
            },
            lo,
            hi,
            &panel_cfg,
        )?;
        total += piece.value;
        total_err += piece.error;
        panels += 1;

        phi += rise;
        t = next;
        if phi >= cfg.exponent_cutoff || at_stop {
            break;
        }
        if (t - start).abs() > cfg.horizon {
            return Err(Error::DivergenceSuspect { start, reached: t, exponent: phi });
        }
        if rise < MIN_PANEL_RISE && !clipped {
            step = 2.0 * width;
        } else if !clipped {
            step = width;
        }
    }

    Ok(TailIntegral {
        value: total,
        error: total_err,
        end: t,
        exponent_at_end: phi,
        panels,
    })
}

/// `∫ e^{-E(t)} dt` from `start` toward `±∞`, truncated at the first panel
/// end where `E ≥ exponent_cutoff`.
///
/// `E` must vanish at `start` and be nondecreasing along `direction`. If the
/// cutoff is not reached within `cfg.horizon` the walk fails with
/// [`Error::DivergenceSuspect`].
pub fn improper_exp_integral<F>(exponent: F, start: f64, direction: Direction, cfg: &QuadratureConfig) -> Result<TailIntegral>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let walk = Walk {
        start,
        direction,
        initial_step: 1.0,
        stop_at: None,
        breakpoints: &[],
    };
    walk_tail(&FnExponent(exponent), |_| Ok(1.0), &walk, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Γ(4/3), reference value.
    const GAMMA_4_3: f64 = 0.892_979_511_569_249_2;

    #[test]
    fn constant_and_odd_integrands() {
        let cfg = QuadratureConfig::default();
        let one = integrate_adaptive(|_| 1.0, 0.0, 1.0, &cfg).unwrap();
        assert_abs_diff_eq!(one.value, 1.0, epsilon = 1e-12);
        let cube = integrate_adaptive(|t| t * t * t, -1.0, 1.0, &cfg).unwrap();
        assert_abs_diff_eq!(cube.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cubic_exponential_gives_gamma_four_thirds() {
        let cfg = QuadratureConfig::default();
        let r = integrate_adaptive(|t: f64| (-t * t * t).exp(), 0.0, 30.0, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, GAMMA_4_3, epsilon = 1e-10);
    }

    #[test]
    fn reports_non_finite_integrand() {
        let cfg = QuadratureConfig::default();
        let err = integrate_adaptive(|t| 1.0 / (t - 0.5), 0.0, 1.0, &cfg);
        // 0.5 is the panel center, hit on the first evaluation.
        assert!(matches!(err, Err(Error::NonFinite { t, .. }) if t == 0.5));
    }

    #[test]
    fn convergence_error_on_singularity() {
        let cfg = QuadratureConfig { max_depth: 12, ..Default::default() };
        let err = integrate_adaptive(|t: f64| 1.0 / t.abs().sqrt().max(1e-300) * t.signum(), -1.0, 1.3, &cfg);
        assert!(matches!(err, Err(Error::Convergence { .. })), "{err:?}");
    }

    #[test]
    fn rejects_reversed_bounds_and_bad_config() {
        let cfg = QuadratureConfig::default();
        assert!(integrate_adaptive(|t| t, 1.0, 0.0, &cfg).is_err());
        assert!(QuadratureConfig::new(0.0, 1e-8, 50, 46.0).is_err());
        assert!(QuadratureConfig::new(1e-10, 1e-8, 5, 46.0).is_err());
        assert!(QuadratureConfig::new(1e-10, 1e-8, 50, 10.0).is_err());
        assert!(QuadratureConfig::new(1e-10, 1e-8, 50, 46.0).is_ok());
    }

    #[test]
    fn exponential_tail() {
        let cfg = QuadratureConfig::default();
        let x = 3.0;
        let r = improper_exp_integral(|t| t - x, x, Direction::Forward, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
        assert!(r.exponent_at_end >= 46.0);
    }

    #[test]
    fn gaussian_half_tail() {
        let cfg = QuadratureConfig::default();
        let x = -1.5;
        let r = improper_exp_integral(|t| (t - x) * (t - x), x, Direction::Forward, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-10);
        let l = improper_exp_integral(|t| (t - x) * (t - x), x, Direction::Backward, &cfg).unwrap();
        assert_abs_diff_eq!(l.value, r.value, epsilon = 1e-12);
    }

    #[test]
    fn flat_exponent_is_divergence_suspect() {
        let cfg = QuadratureConfig::default().with_horizon(1e4);
        let r = improper_exp_integral(|_| 0.0, 0.0, Direction::Forward, &cfg);
        assert!(matches!(r, Err(Error::DivergenceSuspect { .. })), "{r:?}");
    }

    #[test]
    fn raising_cutoff_barely_moves_tail() {
        let base = QuadratureConfig::default();
        let a = improper_exp_integral(|t| t * t * t, 0.0, Direction::Forward, &base).unwrap();
        let b = improper_exp_integral(|t| t * t * t, 0.0, Direction::Forward, &base.with_cutoff(60.0)).unwrap();
        assert!((a.value - b.value).abs() <= 1e-18 * a.value.abs(), "{} vs {}", a.value, b.value);
    }
}
