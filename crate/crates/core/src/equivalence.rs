//! Weak equivalence `φ ≍ ψ` and the verification suites built on it:
//! `J ≍ I ≍ S ≍ d`, unimodal kernels `F ≍ u·v·(d₁ + d₂)`, and the two
//! worked coefficients.

use serde::Serialize;

use crate::average::{d_of_x, q0_estimate, DEFAULT_D_TOL};
use crate::coefficient::{catalog, real_fn, CoefficientFunction, Parity, UnimodalPair};
use crate::error::{Error, Result};
use crate::grid::{linspace, sweep};
use crate::kclass::{membership_report, KGammaReport};
use crate::kernel::{i_of_x, j_of_x, kernel_profile, KernelProfile};
use crate::quadrature::{try_integrate_split, walk_tail, Direction, FnExponent, QuadratureConfig, Walk};

/// Slack on the lower bound `J, I ≥ e^{−2}·d`.
pub const LOWER_BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `max(max φ/ψ, max ψ/φ)`, at least 1.
    pub c_estimate: f64,
    /// Where `φ/ψ` peaks.
    pub argmax_hi: f64,
    /// Where `φ/ψ` bottoms out.
    pub argmax_lo: f64,
    pub grid: String,
    /// `(x, φ(x)/ψ(x))`.
    pub ratios: Vec<(f64, f64)>,
}

fn describe(grid: &[f64]) -> String {
    match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{} points on [{a}, {b}]", grid.len()),
        _ => "empty".to_string(),
    }
}

/// Equivalence constant from sampled values `φ(xᵢ)`, `ψ(xᵢ)`.
pub fn weak_equiv_from_samples(grid: &[f64], phi: &[f64], psi: &[f64]) -> Result<EquivalenceReport> {
    if grid.is_empty() || grid.len() != phi.len() || grid.len() != psi.len() {
        return Err(Error::domain("weak equivalence needs equally long, nonempty samples"));
    }
    let mut ratios = Vec::with_capacity(grid.len());
    let (mut hi, mut lo) = ((f64::NAN, f64::NEG_INFINITY), (f64::NAN, f64::INFINITY));
    for ((&x, &a), &b) in grid.iter().zip(phi).zip(psi) {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("weak equivalence needs positive values, got {a} and {b} at x = {x}")));
        }
        let r = a / b;
        if r > hi.1 {
            hi = (x, r);
        }
        if r < lo.1 {
            lo = (x, r);
        }
        ratios.push((x, r));
    }
    Ok(EquivalenceReport {
        c_estimate: hi.1.max(1.0 / lo.1).max(1.0),
        argmax_hi: hi.0,
        argmax_lo: lo.0,
        grid: describe(grid),
        ratios,
    })
}

/// Smallest `c ≥ 1` with `c⁻¹φ ≤ ψ ≤ cφ` on `grid`.
pub fn weak_equiv_constant<P, S>(phi: P, psi: S, grid: &[f64]) -> Result<EquivalenceReport>
where
    P: Fn(f64) -> Result<f64> + Sync + Send,
    S: Fn(f64) -> Result<f64> + Sync + Send,
{
    let pairs = sweep(grid, |x| Ok((phi(x)?, psi(x)?)))?;
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    weak_equiv_from_samples(grid, &a, &b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm33Report {
    pub profile: KernelProfile,
    pub j_vs_d: EquivalenceReport,
    pub i_vs_d: EquivalenceReport,
    pub s_vs_d: EquivalenceReport,
    /// Grid points with `J` or `I` below `(e^{−2} − slack)·d`.
    pub lower_bound_violations: Vec<f64>,
}

impl Thm33Report {
    pub fn constants(&self) -> (f64, f64, f64) {
        (self.j_vs_d.c_estimate, self.i_vs_d.c_estimate, self.s_vs_d.c_estimate)
    }

    pub fn passed(&self) -> bool {
        let (j, i, s) = self.constants();
        self.lower_bound_violations.is_empty() && j.is_finite() && i.is_finite() && s.is_finite()
    }
}

/// Profiles `J`, `I`, `S` against `d` on `grid`.
pub fn verify_thm33(q: &CoefficientFunction, grid: &[f64], cfg: &QuadratureConfig) -> Result<Thm33Report> {
    let profile = kernel_profile(q, grid, cfg)?;
    let col = |f: fn(&crate::kernel::KernelRow) -> f64| profile.rows.iter().map(f).collect::<Vec<f64>>();
    let d = col(|r| r.d);
    let j_vs_d = weak_equiv_from_samples(grid, &col(|r| r.j), &d)?;
    let i_vs_d = weak_equiv_from_samples(grid, &col(|r| r.i), &d)?;
    let s_vs_d = weak_equiv_from_samples(grid, &col(|r| r.s), &d)?;
    let floor = (-2.0f64).exp() - LOWER_BOUND_SLACK;
    let lower_bound_violations = profile
        .rows
        .iter()
        .filter(|r| r.j_over_d < floor || r.i_over_d < floor)
        .map(|r| r.x)
        .collect();
    Ok(Thm33Report { profile, j_vs_d, i_vs_d, s_vs_d, lower_bound_violations })
}

const UV_PROBE_WINDOW: f64 = 50.0;
const UV_PROBE_N: usize = 1001;

/// `q₁ = −u′/u`, `q₂ = v′/v`.
pub fn uv_to_q(pair: &UnimodalPair) -> Result<(CoefficientFunction, CoefficientFunction)> {
    let ud = pair.u_log_derivative.clone();
    let vd = pair.v_log_derivative.clone();
    for t in linspace(-UV_PROBE_WINDOW, UV_PROBE_WINDOW, UV_PROBE_N) {
        let (a, b) = (-ud(t), vd(t));
        if !(a >= 0.0) || !(b >= 0.0) {
            return Err(Error::domain(format!("pair '{}' gives a negative coefficient at t = {t}", pair.label)));
        }
    }
    let q1 = CoefficientFunction::builder(format!("q1[{}]", pair.label), move |t| -ud(t)).parity(Parity::None).build();
    let q2 = CoefficientFunction::builder(format!("q2[{}]", pair.label), move |t| vd(t)).parity(Parity::None).build();
    Ok((q1, q2))
}

/// `∫ e^{−E}` along a half-axis for a log-difference exponent `E`.
fn log_tail<E>(exponent: E, x: f64, direction: Direction, cfg: &QuadratureConfig) -> Result<f64>
where
    E: Fn(f64) -> f64,
{
    let walk = Walk { start: x, direction, initial_step: 1.0, stop_at: None, breakpoints: &[] };
    Ok(walk_tail(&FnExponent(exponent), |_| Ok(1.0), &walk, cfg)?.value)
}

/// `F(x) = u(x)∫_{−∞}^x v + v(x)∫_x^∞ u`, evaluated as
/// `u(x)v(x)·(∫_{−∞}^x v(t)/v(x) dt + ∫_x^∞ u(t)/u(x) dt)`.
pub fn f_of_x(pair: &UnimodalPair, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let (lu, lv) = (pair.log_u.clone(), pair.log_v.clone());
    let (lux, lvx) = (lu(x), lv(x));
    let left = log_tail(|t| lvx - lv(t), x, Direction::Backward, cfg)?;
    let right = log_tail(|t| lux - lu(t), x, Direction::Forward, cfg)?;
    Ok((lux + lvx).exp() * (left + right))
}

/// `∫_{x−L}^{x+L} G(x,t) dt` by plain quadrature, `G(x,t) = u(max(x,t))·v(min(x,t))`.
pub fn f_of_x_direct(pair: &UnimodalPair, x: f64, half_width: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let g = |t: f64| -> Result<f64> {
        let (hi, lo) = if t >= x { (t, x) } else { (x, t) };
        Ok(((pair.log_u)(hi) + (pair.log_v)(lo)).exp())
    };
    Ok(try_integrate_split(g, x - half_width, x + half_width, &[x], cfg)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnimodalEstimate {
    pub x: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    /// `u(x)v(x)(d₁ + d₂)`.
    pub predicted: f64,
    /// `F / predicted`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm35Report {
    pub estimates: Vec<UnimodalEstimate>,
    pub equivalence: EquivalenceReport,
}

/// Compares `F` with `u·v·(d₁ + d₂)` on `grid`.
pub fn verify_thm35(pair: &UnimodalPair, grid: &[f64], cfg: &QuadratureConfig) -> Result<Thm35Report> {
    let (q1, q2) = uv_to_q(pair)?;
    let estimates = sweep(grid, |x| {
        let f = f_of_x(pair, x, cfg)?;
        let d1 = d_of_x(&q1, x, DEFAULT_D_TOL)?.d;
        let d2 = d_of_x(&q2, x, DEFAULT_D_TOL)?.d;
        let predicted = ((pair.log_u)(x) + (pair.log_v)(x)).exp() * (d1 + d2);
        Ok(UnimodalEstimate { x, f, d1, d2, predicted, ratio: f / predicted })
    })?;
    let f: Vec<f64> = estimates.iter().map(|e| e.f).collect();
    let p: Vec<f64> = estimates.iter().map(|e| e.predicted).collect();
    let equivalence = weak_equiv_from_samples(grid, &f, &p)?;
    Ok(Thm35Report { estimates, equivalence })
}

/// `φ(s) = s³ + s cos s`, the phase of the second worked kernel.
fn phi(s: f64) -> f64 {
    s * s * s + s * s.cos()
}

/// `F₁(x) = ∫ G₁(x,t) dt` with `G₁ = e^{t³ + t cos t − x³}` for `t ≤ x` and
/// `e^{x³ − t cos t − t³}` for `t ≥ x`.
pub fn f1_of_x(x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let px = phi(x);
    let left = log_tail(|t| px - phi(t), x, Direction::Backward, cfg)?;
    let right = log_tail(|t| phi(t) - px, x, Direction::Forward, cfg)?;
    let xc = x * x.cos();
    Ok(xc.exp() * left + (-xc).exp() * right)
}

/// `h(x) = e^{x cos x}·I(x) + e^{−x cos x}·J(x)` for `q = 3t² − t sin t`;
/// `e^{−2}h < F₁ < e²h`.
pub fn f1_sandwich_h(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let xc = x * x.cos();
    Ok(xc.exp() * i_of_x(q, x, cfg)? + (-xc).exp() * j_of_x(q, x, cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Example2Row {
    pub x: f64,
    pub f1: f64,
    pub h: f64,
    /// `F₁(x)(x² + 1)/cosh(x cos x)`.
    pub normalized: f64,
    pub sandwich: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example2Report {
    pub rows: Vec<Example2Row>,
    /// `F₁` against `cosh(x cos x)/(x² + 1)`.
    pub equivalence: EquivalenceReport,
    pub sandwich_violations: Vec<f64>,
}

pub fn verify_example2(grid: &[f64], cfg: &QuadratureConfig) -> Result<Example2Report> {
    let q = catalog::example2();
    let e2 = 2.0f64.exp();
    let rows = sweep(grid, |x| {
        let f1 = f1_of_x(x, cfg)?;
        let h = f1_sandwich_h(&q, x, cfg)?;
        let shape = (x * x.cos()).cosh() / (x * x + 1.0);
        Ok(Example2Row { x, f1, h, normalized: f1 / shape, sandwich: h / e2 < f1 && f1 < e2 * h })
    })?;
    let f1: Vec<f64> = rows.iter().map(|r| r.f1).collect();
    let shape: Vec<f64> = grid.iter().map(|&x| (x * x.cos()).cosh() / (x * x + 1.0)).collect();
    let equivalence = weak_equiv_from_samples(grid, &f1, &shape)?;
    let sandwich_violations = rows.iter().filter(|r| !r.sandwich).map(|r| r.x).collect();
    Ok(Example2Report { rows, equivalence, sandwich_violations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example1Report {
    pub alpha: f64,
    pub beta: f64,
    /// `min{4α, 2β + 2α − 1}`.
    pub nu: f64,
    /// `d(x)` against `(1+x²)^α`.
    pub d_shape: EquivalenceReport,
    /// `max_± |d(±x)(1+x²)^{−α} − 1|` at `|x| = 10` and `|x| = 100`.
    pub deviation_10: f64,
    pub deviation_100: f64,
    /// `q₀(1)` on windows 10 and 100.
    pub q0_window_10: f64,
    pub q0_window_100: f64,
    pub kclass: KGammaReport,
    pub thm33: Thm33Report,
}

impl Example1Report {
    pub fn deviation_decays(&self) -> bool {
        self.deviation_100 < self.deviation_10
    }

    pub fn q0_decays(&self) -> bool {
        self.q0_window_100 < self.q0_window_10
    }
}

/// Checks `d ≍ (1+x²)^α`, the decay of `d(x)(1+x²)^{−α} − 1`, the decay of
/// `q₀(1)` with the window, `K(γ)` diagnostics for `|x| ≥ 10` and `J ≍ I ≍ S ≍ d`.
pub fn verify_example1(alpha: f64, beta: f64, grid: &[f64], cfg: &QuadratureConfig) -> Result<Example1Report> {
    let q = catalog::example1(alpha, beta)?;
    let shape = move |x: f64| (1.0 + x * x).powf(alpha);
    let d_shape = weak_equiv_constant(|x| Ok(d_of_x(&q, x, DEFAULT_D_TOL)?.d), |x| Ok(shape(x)), grid)?;
    let deviation = |m: f64| -> Result<f64> {
        let a = (d_of_x(&q, m, DEFAULT_D_TOL)?.d / shape(m) - 1.0).abs();
        let b = (d_of_x(&q, -m, DEFAULT_D_TOL)?.d / shape(m) - 1.0).abs();
        Ok(a.max(b))
    };
    let x0 = 10.0;
    let probes: Vec<f64> = grid.iter().copied().filter(|x| x.abs() >= x0).collect();
    Ok(Example1Report {
        alpha,
        beta,
        nu: (4.0 * alpha).min(2.0 * beta + 2.0 * alpha - 1.0),
        d_shape,
        deviation_10: deviation(10.0)?,
        deviation_100: deviation(100.0)?,
        q0_window_10: q0_estimate(&q, 1.0, 10.0, 201)?,
        q0_window_100: q0_estimate(&q, 1.0, 100.0, 2001)?,
        kclass: membership_report(&q, x0, &probes)?,
        thm33: verify_thm33(&q, grid, cfg)?,
    })
}

/// Pair `(e^{−t³−t}, e^{t³+t})` with `u·v ≡ 1`; convenience for examples.
pub fn cubic_pair() -> UnimodalPair {
    UnimodalPair::new(
        "cubic",
        real_fn(|t| -t * t * t - t),
        real_fn(|t| t * t * t + t),
        real_fn(|t| -3.0 * t * t - 1.0),
        real_fn(|t| 3.0 * t * t + 1.0),
    )
}
