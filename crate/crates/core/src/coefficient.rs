//! Coefficient functions `q ≥ 0`, their decompositions `q = q₁ + q₂`,
//! unimodal kernel pairs, and the cached antiderivative that backs every
//! `∫ q` in the crate.

use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate_adaptive, QuadratureConfig};

/// Shared real function.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn real_fn<F>(f: F) -> RealFn
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// The positive, smooth part `q₁` of a decomposition together with `q₁′`.
#[derive(Clone)]
pub struct SmoothPart {
    pub value: RealFn,
    pub derivative: RealFn,
}

impl SmoothPart {
    pub fn new(value: RealFn, derivative: RealFn) -> Self {
        Self { value, derivative }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

impl fmt::Debug for SmoothPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SmoothPart { .. }")
    }
}

/// `q = q₁ + q₂` with `q₁ > 0` smooth and `q₂` locally integrable.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub smooth: SmoothPart,
    pub remainder: RemainderFn,
}

/// Wrapper so `Decomposition` can derive `Debug`.
#[derive(Clone)]
pub struct RemainderFn(pub RealFn);

impl fmt::Debug for RemainderFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RemainderFn(..)")
    }
}

impl Decomposition {
    pub fn new(smooth: SmoothPart, remainder: RealFn) -> Self {
        Self {
            smooth,
            remainder: RemainderFn(remainder),
        }
    }

    pub fn remainder(&self, t: f64) -> f64 {
        (self.remainder.0)(t)
    }
}

/// Lazily built table of `P(t) = ∫₀ᵗ q` at fixed cell boundaries.
///
/// Boundaries are `k·h` up to `uniform_limit`, then double geometrically.
/// Each side of the origin is extended on demand under a write lock, and a
/// cell's integral depends only on its index, so concurrent readers always
/// see the same values.
pub struct CumulativeIntegral {
    base_point: f64,
    cell_width: f64,
    uniform_cells: usize,
    refinement_tolerance: f64,
    forward: RwLock<Vec<f64>>,
    backward: RwLock<Vec<f64>>,
}

/// Cells whose far boundary would exceed this are never tabulated.
const CACHE_REACH: f64 = 1e15;
// Each geometric cell beyond the uniform range is pre-split this many times.
const GEOMETRIC_SUBPANELS: usize = 256;

impl CumulativeIntegral {
    pub fn new(refinement_tolerance: f64) -> Self {
        Self {
            base_point: 0.0,
            cell_width: 0.25,
            uniform_cells: 16_384,
            refinement_tolerance,
            forward: RwLock::new(vec![0.0]),
            backward: RwLock::new(vec![0.0]),
        }
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    pub fn refinement_tolerance(&self) -> f64 {
        self.refinement_tolerance
    }

    /// Distance from the base point of boundary `k` on either side.
    fn boundary(&self, k: usize) -> f64 {
        if k <= self.uniform_cells {
            k as f64 * self.cell_width
        } else {
            let limit = self.uniform_cells as f64 * self.cell_width;
            limit * 2f64.powi((k - self.uniform_cells) as i32)
        }
    }

    /// Largest boundary index with `boundary(k) <= r`.
    fn index_below(&self, r: f64) -> usize {
        let limit = self.uniform_cells as f64 * self.cell_width;
        if r <= limit {
            (r / self.cell_width).floor() as usize
        } else {
            let extra = (r / limit).log2().floor() as usize;
            let mut k = self.uniform_cells + extra;
            // Guard against log2 rounding.
            while self.boundary(k) > r {
                k -= 1;
            }
            while self.boundary(k + 1) <= r {
                k += 1;
            }
            k
        }
    }

    /// Smallest boundary index with `boundary(k) >= r`.
    fn index_above(&self, r: f64) -> usize {
        let k = self.index_below(r);
        if self.boundary(k) >= r {
            k
        } else {
            k + 1
        }
    }

    fn cell_integral(&self, q: &Inner, k: usize, backward: bool) -> Result<f64> {
        let (r0, r1) = (self.boundary(k), self.boundary(k + 1));
        let (lo, hi) = if backward { (-r1, -r0) } else { (r0, r1) };
        let cfg = QuadratureConfig {
            abs_tol: self.refinement_tolerance * (r1 - r0),
            rel_tol: 1e-13,
            ..QuadratureConfig::oscillatory()
        };
        let panels = if k < self.uniform_cells { 1 } else { GEOMETRIC_SUBPANELS };
        let mut total = 0.0;
        let step = (hi - lo) / panels as f64;
        for i in 0..panels {
            let a = lo + step * i as f64;
            let b = if i + 1 == panels { hi } else { lo + step * (i + 1) as f64 };
            total += q.direct(a, b, &cfg)?;
        }
        Ok(total)
    }

    /// `∫` from the base point to boundary `k` on one side (nonnegative for q ≥ 0).
    fn prefix(&self, q: &Inner, k: usize, backward: bool) -> Result<f64> {
        let table = if backward { &self.backward } else { &self.forward };
        {
            let read = table.read().expect("cache lock poisoned");
            if let Some(&v) = read.get(k) {
                return Ok(v);
            }
        }
        let mut write = table.write().expect("cache lock poisoned");
        while write.len() <= k {
            let idx = write.len() - 1;
            let last = write[idx];
            let cell = self.cell_integral(q, idx, backward)?;
            write.push(last + cell);
        }
        Ok(write[k])
    }

    /// Signed position of a boundary: `index > 0` forward, `< 0` backward.
    fn position(&self, index: i64) -> f64 {
        let r = self.boundary(index.unsigned_abs() as usize);
        if index < 0 {
            -r
        } else {
            r
        }
    }

    /// `P(B_index) = ∫₀^{B_index} q` with sign convention of an antiderivative.
    fn antiderivative_at(&self, q: &Inner, index: i64) -> Result<f64> {
        if index >= 0 {
            self.prefix(q, index as usize, false)
        } else {
            Ok(-self.prefix(q, index.unsigned_abs() as usize, true)?)
        }
    }

    /// First boundary at or after `t`, as a signed index.
    fn first_at_or_after(&self, t: f64) -> i64 {
        if t >= 0.0 {
            self.index_above(t) as i64
        } else {
            -(self.index_below(-t) as i64)
        }
    }

    /// Last boundary at or before `t`, as a signed index.
    fn last_at_or_before(&self, t: f64) -> i64 {
        if t >= 0.0 {
            self.index_below(t) as i64
        } else {
            -(self.index_above(-t) as i64)
        }
    }
}

impl fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fw = self.forward.read().map(|v| v.len()).unwrap_or(0);
        let bw = self.backward.read().map(|v| v.len()).unwrap_or(0);
        f.debug_struct("CumulativeIntegral")
            .field("cell_width", &self.cell_width)
            .field("forward_cells", &fw)
            .field("backward_cells", &bw)
            .finish()
    }
}

struct Inner {
    label: String,
    value: RealFn,
    derivative: Option<RealFn>,
    parity: Parity,
    decomposition: Option<Decomposition>,
    /// Local length scale of oscillations; long integrals are pre-split to it.
    oscillation_scale: Option<RealFn>,
    cache: CumulativeIntegral,
}

// Direct quadrature tolerances for ∫ q over short intervals.
const DIRECT_ABS_TOL: f64 = 1e-15;
const DIRECT_REL_TOL: f64 = 1e-13;
const MAX_PRESPLIT: usize = 4096;

impl Inner {
    fn eval(&self, t: f64) -> Result<f64> {
        let v = (self.value)(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { t, value: v })
        }
    }

    fn direct(&self, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let pieces = match &self.oscillation_scale {
            Some(scale) => {
                let s = scale(0.5 * (a + b)).abs().max(f64::MIN_POSITIVE);
                (((b - a) / s).ceil() as usize).clamp(1, MAX_PRESPLIT)
            }
            None => 1,
        };
        let step = (b - a) / pieces as f64;
        let mut total = 0.0;
        for i in 0..pieces {
            let lo = a + step * i as f64;
            let hi = if i + 1 == pieces { b } else { a + step * (i + 1) as f64 };
            total += try_integrate_adaptive(|t| self.eval(t), lo, hi, cfg)?.value;
        }
        Ok(total)
    }

    fn direct_default(&self, a: f64, b: f64) -> Result<f64> {
        let cfg = QuadratureConfig {
            abs_tol: DIRECT_ABS_TOL * (b - a).max(1.0),
            rel_tol: DIRECT_REL_TOL,
            ..QuadratureConfig::oscillatory()
        };
        self.direct(a, b, &cfg)
    }

    fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!("∫q bounds must be finite, got [{a}, {b}]")));
        }
        if a > b {
            return Err(Error::domain(format!("∫q requires a <= b, got [{a}, {b}]")));
        }
        if a == b {
            return Ok(0.0);
        }
        let cache = &self.cache;
        if a.abs().max(b.abs()) > CACHE_REACH {
            return self.direct_default(a, b);
        }
        let first = cache.first_at_or_after(a);
        let last = cache.last_at_or_before(b);
        if last <= first {
            return self.direct_default(a, b);
        }
        let (ba, bb) = (cache.position(first), cache.position(last));
        let head = self.direct_default(a, ba)?;
        let tail = self.direct_default(bb, b)?;
        let middle = cache.antiderivative_at(self, last)? - cache.antiderivative_at(self, first)?;
        Ok(head + middle + tail)
    }
}

/// A coefficient `q ≥ 0` of `-y′ + q y = f`.
///
/// Cloning is cheap and clones share the antiderivative cache.
#[derive(Clone)]
pub struct CoefficientFunction {
    inner: Arc<Inner>,
}

impl fmt::Debug for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientFunction")
            .field("label", &self.inner.label)
            .field("parity", &self.inner.parity)
            .field("decomposition", &self.inner.decomposition.is_some())
            .field("cache", &self.inner.cache)
            .finish()
    }
}

/// Builder for [`CoefficientFunction`].
pub struct CoefficientBuilder {
    label: String,
    value: RealFn,
    derivative: Option<RealFn>,
    parity: Parity,
    decomposition: Option<Decomposition>,
    oscillation_scale: Option<RealFn>,
    refinement_tolerance: f64,
}

impl CoefficientBuilder {
    pub fn derivative(mut self, d: RealFn) -> Self {
        self.derivative = Some(d);
        self
    }

    pub fn parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn decomposition(mut self, smooth: SmoothPart, remainder: RealFn) -> Self {
        self.decomposition = Some(Decomposition::new(smooth, remainder));
        self
    }

    pub fn oscillation_scale(mut self, scale: RealFn) -> Self {
        self.oscillation_scale = Some(scale);
        self
    }

    /// Absolute per-unit-length tolerance of the antiderivative cells.
    pub fn refinement_tolerance(mut self, tol: f64) -> Self {
        self.refinement_tolerance = tol;
        self
    }

    pub fn build(self) -> CoefficientFunction {
        CoefficientFunction {
            inner: Arc::new(Inner {
                label: self.label,
                value: self.value,
                derivative: self.derivative,
                parity: self.parity,
                decomposition: self.decomposition,
                oscillation_scale: self.oscillation_scale,
                cache: CumulativeIntegral::new(self.refinement_tolerance),
            }),
        }
    }
}

impl CoefficientFunction {
    pub fn builder<F>(label: impl Into<String>, value: F) -> CoefficientBuilder
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CoefficientBuilder {
            label: label.into(),
            value: Arc::new(value),
            derivative: None,
            parity: Parity::None,
            decomposition: None,
            oscillation_scale: None,
            refinement_tolerance: 1e-10,
        }
    }

    /// A coefficient with no extra structure.
    pub fn new<F>(label: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::builder(label, value).build()
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.inner.value)(t)
    }

    pub fn derivative(&self) -> Option<&RealFn> {
        self.inner.derivative.as_ref()
    }

    pub fn parity(&self) -> Parity {
        self.inner.parity
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        self.inner.decomposition.as_ref()
    }

    pub fn cache(&self) -> &CumulativeIntegral {
        &self.inner.cache
    }

    /// `∫_a^b q` for `a ≤ b`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        self.inner.integrate(a, b)
    }

    /// `∫_a^b q` with orientation: negative when `b < a`.
    pub fn integrate_signed(&self, a: f64, b: f64) -> Result<f64> {
        if a <= b {
            self.integrate(a, b)
        } else {
            Ok(-self.integrate(b, a)?)
        }
    }

    /// `P(t) = ∫₀ᵗ q`.
    pub fn antiderivative(&self, t: f64) -> Result<f64> {
        self.integrate_signed(self.inner.cache.base_point, t)
    }
}

/// `∫_a^b q(t) dt` for `a ≤ b`.
pub fn integrate_q(q: &CoefficientFunction, a: f64, b: f64) -> Result<f64> {
    q.integrate(a, b)
}

/// Log-domain description of a uniformly unimodal kernel `G(x,t)`: `u`
/// nonincreasing, `v` nondecreasing.
///
/// `u` and `v` are held through their logarithms so that values such as
/// `e^{-t³}` stay representable far out on the axis.
#[derive(Clone)]
pub struct UnimodalPair {
    pub label: String,
    pub log_u: RealFn,
    pub log_v: RealFn,
    /// `u′/u`.
    pub u_log_derivative: RealFn,
    /// `v′/v`.
    pub v_log_derivative: RealFn,
}

impl fmt::Debug for UnimodalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnimodalPair").field("label", &self.label).finish()
    }
}

impl UnimodalPair {
    pub fn new(label: impl Into<String>, log_u: RealFn, log_v: RealFn, u_log_derivative: RealFn, v_log_derivative: RealFn) -> Self {
        Self {
            label: label.into(),
            log_u,
            log_v,
            u_log_derivative,
            v_log_derivative,
        }
    }

    pub fn u(&self, t: f64) -> f64 {
        (self.log_u)(t).exp()
    }

    pub fn v(&self, t: f64) -> f64 {
        (self.log_v)(t).exp()
    }

    /// Checks monotonicity on `grid` and decay of `u` at `+∞`, `v` at `-∞`
    /// along `probes` (increasing magnitudes).
    pub fn check(&self, grid: &[f64], probes: &[f64]) -> Result<()> {
        for &t in grid {
            let du = (self.u_log_derivative)(t);
            let dv = (self.v_log_derivative)(t);
            if !(du <= 0.0) {
                return Err(Error::domain(format!("u is increasing at t = {t} (u'/u = {du})")));
            }
            if !(dv >= 0.0) {
                return Err(Error::domain(format!("v is decreasing at t = {t} (v'/v = {dv})")));
            }
        }
        let decays = |f: &dyn Fn(f64) -> f64| probes.windows(2).all(|w| f(w[1]) <= f(w[0]));
        if !decays(&|t| (self.log_u)(t)) {
            return Err(Error::domain("u does not decay toward +inf on the probes"));
        }
        if !decays(&|t| (self.log_v)(-t)) {
            return Err(Error::domain("v does not decay toward -inf on the probes"));
        }
        if let Some(&far) = probes.last() {
            if (self.log_u)(far) > -20.0 || (self.log_v)(-far) > -20.0 {
                return Err(Error::domain(format!("u or v is not small at |t| = {far}")));
            }
        }
        Ok(())
    }

    /// Named pairs: `exp` (e^{-t}, e^{t}), `cubic` (e^{-t³-t}, e^{t³+t}),
    /// `cubic-sym` (e^{-t³}, e^{t³}).
    pub fn catalog(label: &str) -> Result<Self> {
        match label {
            "exp" => Ok(Self::new("exp", real_fn(|t| -t), real_fn(|t| t), real_fn(|_| -1.0), real_fn(|_| 1.0))),
            "cubic" => Ok(Self::new(
                "cubic",
                real_fn(|t| -t * t * t - t),
                real_fn(|t| t * t * t + t),
                real_fn(|t| -3.0 * t * t - 1.0),
                real_fn(|t| 3.0 * t * t + 1.0),
            )),
            "cubic-sym" => Ok(Self::new(
                "cubic-sym",
                real_fn(|t| -t * t * t),
                real_fn(|t| t * t * t),
                real_fn(|t| -3.0 * t * t),
                real_fn(|t| 3.0 * t * t),
            )),
            other => Err(Error::domain(format!(
                "unknown unimodal pair '{other}' (known: exp, cubic, cubic-sym)"
            ))),
        }
    }
}

/// Named coefficients reachable from the command line.
pub mod catalog {
    use super::*;

    pub const LABELS: &str = "const:<k>, square, example1:<alpha>:<beta>, example2";

    /// `q ≡ k`.
    pub fn constant(k: f64) -> Result<CoefficientFunction> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::domain(format!("constant coefficient must be finite and >= 0, got {k}")));
        }
        let mut b = CoefficientFunction::builder(format!("const:{k}"), move |_| k)
            .derivative(real_fn(|_| 0.0))
            .parity(Parity::Even);
        if k > 0.0 {
            b = b.decomposition(SmoothPart::new(real_fn(move |_| k), real_fn(|_| 0.0)), real_fn(|_| 0.0));
        }
        Ok(b.build())
    }

    /// `q(t) = t²`, decomposed as `(t² + 1) + (-1)`.
    pub fn square() -> CoefficientFunction {
        CoefficientFunction::builder("square", |t| t * t)
            .derivative(real_fn(|t| 2.0 * t))
            .parity(Parity::Even)
            .decomposition(
                SmoothPart::new(real_fn(|t| t * t + 1.0), real_fn(|t| 2.0 * t)),
                real_fn(|_| -1.0),
            )
            .build()
    }

    /// `q(x) = (1 + cos((1+x²)^β)) / (1+x²)^α` with `0 < α < 1/2`, `α + β > 1/2`.
    pub fn example1(alpha: f64, beta: f64) -> Result<CoefficientFunction> {
        if !(alpha > 0.0 && alpha < 0.5 && alpha + beta > 0.5 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "example1 needs 0 < alpha < 1/2 and alpha + beta > 1/2, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let q = move |x: f64| {
            let s = 1.0 + x * x;
            (1.0 + s.powf(beta).cos()) * s.powf(-alpha)
        };
        let dq = move |x: f64| {
            let s = 1.0 + x * x;
            let phase = s.powf(beta);
            2.0 * x
                * (-beta * s.powf(beta - 1.0) * phase.sin() * s.powf(-alpha)
                    - alpha * (1.0 + phase.cos()) * s.powf(-alpha - 1.0))
        };
        let q1 = move |x: f64| (1.0 + x * x).powf(-alpha);
        let dq1 = move |x: f64| -2.0 * alpha * x * (1.0 + x * x).powf(-alpha - 1.0);
        let q2 = move |x: f64| {
            let s = 1.0 + x * x;
            s.powf(beta).cos() * s.powf(-alpha)
        };
        // Half the local period of cos((1+x²)^β), capped at one unit.
        let scale = move |x: f64| {
            let rate = (2.0 * beta * x * (1.0 + x * x).powf(beta - 1.0)).abs();
            if rate > 0.0 {
                (std::f64::consts::PI / rate).min(1.0)
            } else {
                1.0
            }
        };
        Ok(CoefficientFunction::builder(format!("example1:{alpha}:{beta}"), q)
            .derivative(real_fn(dq))
            .parity(Parity::Even)
            .decomposition(SmoothPart::new(real_fn(q1), real_fn(dq1)), real_fn(q2))
            .oscillation_scale(real_fn(scale))
            .build())
    }

    /// `q(t) = 3t² - t sin t`, decomposed as `(3t² + 1) + (-1 - t sin t)`.
    pub fn example2() -> CoefficientFunction {
        CoefficientFunction::builder("example2", |t: f64| 3.0 * t * t - t * t.sin())
            .derivative(real_fn(|t: f64| 6.0 * t - t.sin() - t * t.cos()))
            .parity(Parity::Even)
            .decomposition(
                SmoothPart::new(real_fn(|t| 3.0 * t * t + 1.0), real_fn(|t| 6.0 * t)),
                real_fn(|t: f64| -1.0 - t * t.sin()),
            )
            .build()
    }

    /// Parses `const:<k>`, `square`, `example1:<alpha>:<beta>`, `example2`.
    pub fn from_label(label: &str) -> Result<CoefficientFunction> {
        let parts: Vec<&str> = label.split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::domain(format!("cannot parse '{s}' in coefficient label '{label}'")))
        };
        match parts.as_slice() {
            ["const", k] => constant(num(k)?),
            ["square"] => Ok(square()),
            ["example1", a, b] => example1(num(a)?, num(b)?),
            ["example2"] => Ok(example2()),
            _ => Err(Error::domain(format!(
                "unknown coefficient '{label}'; known coefficients: {LABELS}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrate_q_closed_forms() {
        let one = constant(1.0).unwrap();
        assert_abs_diff_eq!(integrate_q(&one, 0.0, 2.0).unwrap(), 2.0, epsilon = 1e-13);
        let sq = square();
        assert_abs_diff_eq!(integrate_q(&sq, -1.0, 1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-13);
        // Long interval through the cache.
        assert_abs_diff_eq!(integrate_q(&sq, -3.3, 7.9).unwrap(), (7.9f64.powi(3) + 3.3f64.powi(3)) / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn integrate_q_example2_matches_antiderivative() {
        // ∫₀¹ 3t² - t sin t = 1 - (sin 1 - cos 1)
        let q = example2();
        let expected = 1.0 - (1f64.sin() - 1f64.cos());
        assert_abs_diff_eq!(integrate_q(&q, 0.0, 1.0).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.698_831_3, epsilon = 1e-7);
    }

    #[test]
    fn non_finite_coefficient_names_t() {
        let q = CoefficientFunction::new("pole", |t| 1.0 / (t - 0.5));
        match integrate_q(&q, 0.0, 1.0) {
            Err(Error::NonFinite { t, .. }) => assert_eq!(t, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(integrate_q(&square(), 1.0, 0.0).is_err());
        assert_abs_diff_eq!(square().integrate_signed(1.0, 0.0).unwrap(), -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn catalog_values() {
        let q = example1(0.3, 0.4).unwrap();
        assert_abs_diff_eq!(q.eval(0.0), 1.0 + 1f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(q.eval(0.0), 1.540_302, epsilon = 1e-6);
        assert_eq!(q.eval(3.7), q.eval(-3.7));
        assert!(example1(0.45, 0.04).is_err());
        assert!(example1(0.5, 0.4).is_err());

        let q = example2();
        assert_eq!(q.eval(0.0), 0.0);
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(q.eval(pi), 3.0 * pi * pi, epsilon = 1e-12);
        let d = q.decomposition().unwrap();
        assert_abs_diff_eq!(d.smooth.eval(2.0) + d.remainder(2.0), q.eval(2.0), epsilon = 1e-13);
        assert_abs_diff_eq!(q.eval(2.0), 10.181_405, epsilon = 1e-6);
    }

    #[test]
    fn labels_parse() {
        assert_eq!(from_label("const:2.5").unwrap().eval(9.0), 2.5);
        assert_eq!(from_label("square").unwrap().eval(3.0), 9.0);
        assert!(from_label("example1:0.3:0.4").is_ok());
        assert!(from_label("example2").is_ok());
        let err = from_label("gauss").unwrap_err();
        assert!(err.to_string().contains("example2"));
        assert!(from_label("const:-1").is_err());
        assert!(from_label("example1:0.3").is_err());
    }

    #[test]
    fn far_field_integral_uses_geometric_cells() {
        let q = constant(1.0).unwrap();
        let v = integrate_q(&q, -1.0e5, 3.0e6).unwrap();
        assert!((v - 3.1e6).abs() < 1e-6 * 3.1e6, "{v}");
        let g = CoefficientFunction::new("gauss", |t: f64| (-t * t).exp());
        let v = integrate_q(&g, -1e9, 1e9).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn unimodal_catalog_passes_checks() {
        let grid: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.5).collect();
        for label in ["exp", "cubic", "cubic-sym"] {
            UnimodalPair::catalog(label).unwrap().check(&grid, &[10.0, 20.0, 40.0]).unwrap();
        }
        let bad = UnimodalPair::new("bad", real_fn(|t| t), real_fn(|t| t), real_fn(|_| 1.0), real_fn(|_| 1.0));
        assert!(bad.check(&grid, &[10.0]).is_err());
    }
}
