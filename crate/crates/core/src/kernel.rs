//! Kernel integrals `I`, `J`, `S`, the Green operator
//! `(Gf)(x) = ∫_x^∞ e^{−∫_x^t q} f(t) dt`, the weight functional `M(x)`,
//! weighted norms, the homogeneous solution and admissibility estimates.

use std::fmt;

use serde::Serialize;

use crate::average::{d_of_x, DEFAULT_D_TOL};
use crate::coefficient::{real_fn, CoefficientFunction, RealFn};
use crate::error::{Error, Result};
use crate::grid::sweep;
use crate::quadrature::{try_integrate_adaptive, try_integrate_split, walk_tail, Direction, Exponent, QuadratureConfig, TailIntegral, Walk};

/// Version tag of [`standard_family`].
pub const FAMILY_VERSION: &str = "family-v1";
/// Gaussian forcings are cut off this far from their center.
pub const GAUSSIAN_REACH: f64 = 12.0;
/// Default finite-difference step of [`residual_check`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Panels per window in [`homogeneous_divergence_check`].
pub const LOG_NORM_PANELS: usize = 256;

/// `|∫_origin^t q|`, nondecreasing away from `origin` since `q ≥ 0`.
struct Mass<'a> {
    q: &'a CoefficientFunction,
    origin: f64,
}

impl Exponent for Mass<'_> {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.q.integrate_signed(self.origin, t)?.abs())
    }

    fn increment(&self, from: f64, to: f64) -> Result<f64> {
        Ok(self.q.integrate_signed(from, to)?.abs())
    }
}

fn unit_walk(start: f64, direction: Direction) -> Walk<'static> {
    Walk { start, direction, initial_step: 1.0, stop_at: None, breakpoints: &[] }
}

/// `J(x) = ∫_x^∞ e^{−∫_x^t q} dt` with truncation diagnostics.
pub fn j_tail(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<TailIntegral> {
    cfg.validate()?;
    walk_tail(&Mass { q, origin: x }, |_| Ok(1.0), &unit_walk(x, Direction::Forward), cfg)
}

/// `I(x) = ∫_{−∞}^x e^{−∫_t^x q} dt` with truncation diagnostics.
pub fn i_tail(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<TailIntegral> {
    cfg.validate()?;
    walk_tail(&Mass { q, origin: x }, |_| Ok(1.0), &unit_walk(x, Direction::Backward), cfg)
}

pub fn j_of_x(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(j_tail(q, x, cfg)?.value)
}

pub fn i_of_x(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(i_tail(q, x, cfg)?.value)
}

/// `S(x) = ∫ e^{−|∫_x^t q|} dt = I(x) + J(x)`.
pub fn s_of_x(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(i_of_x(q, x, cfg)? + j_of_x(q, x, cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelRow {
    pub x: f64,
    pub d: f64,
    pub q_star: f64,
    pub i: f64,
    pub j: f64,
    pub s: f64,
    pub j_over_d: f64,
    pub i_over_d: f64,
    pub s_over_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelProfile {
    pub rows: Vec<KernelRow>,
}

pub fn kernel_row(q: &CoefficientFunction, x: f64, cfg: &QuadratureConfig) -> Result<KernelRow> {
    let d = d_of_x(q, x, DEFAULT_D_TOL)?.d;
    let i = i_of_x(q, x, cfg)?;
    let j = j_of_x(q, x, cfg)?;
    let s = i + j;
    Ok(KernelRow { x, d, q_star: 1.0 / d, i, j, s, j_over_d: j / d, i_over_d: i / d, s_over_d: s / d })
}

pub fn kernel_profile(q: &CoefficientFunction, grid: &[f64], cfg: &QuadratureConfig) -> Result<KernelProfile> {
    Ok(KernelProfile { rows: sweep(grid, |x| kernel_row(q, x, cfg))? })
}

/// A right-hand side `f` with compact support and known kinks.
#[derive(Clone)]
pub struct Forcing {
    pub label: String,
    f: RealFn,
    /// `f` vanishes outside `[lo, hi]`.
    pub support: (f64, f64),
    /// Points where `f` or its derivative may jump.
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Forcing")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl Forcing {
    pub fn new(label: impl Into<String>, f: RealFn, support: (f64, f64), breakpoints: Vec<f64>) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("forcing support must be a finite interval, got [{lo}, {hi}]")));
        }
        Ok(Self { label: label.into(), f, support, breakpoints })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            0.0
        } else {
            (self.f)(t)
        }
    }

    pub fn zero() -> Self {
        Self { label: "zero".into(), f: real_fn(|_| 0.0), support: (0.0, 0.0), breakpoints: Vec::new() }
    }

    /// `1` on `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(format!("indicator[{a},{b}]"), real_fn(|_| 1.0), (a, b), vec![a, b])
    }

    /// `e^{−(t−c)²}`, cut off at `|t − c| = GAUSSIAN_REACH`.
    pub fn gaussian(center: f64) -> Self {
        Self {
            label: format!("gauss@{center}"),
            f: real_fn(move |t| (-(t - center) * (t - center)).exp()),
            support: (center - GAUSSIAN_REACH, center + GAUSSIAN_REACH),
            breakpoints: Vec::new(),
        }
    }

    /// Hat of height 1 on `[c − w, c + w]`.
    pub fn triangle(center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::domain(format!("triangle half-width must be positive, got {half_width}")));
        }
        Self::new(
            format!("triangle@{center}/{half_width}"),
            real_fn(move |t| (1.0 - (t - center).abs() / half_width).max(0.0)),
            (center - half_width, center + half_width),
            vec![center - half_width, center, center + half_width],
        )
    }

    /// `exp(1 − 1/(1 − s²))`, `s = (t − c)/r`: smooth, height 1, support `[c − r, c + r]`.
    pub fn bump(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::domain(format!("bump radius must be positive, got {radius}")));
        }
        Self::new(
            format!("bump@{center}/{radius}"),
            real_fn(move |t| {
                let s = (t - center) / radius;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }),
            (center - radius, center + radius),
            Vec::new(),
        )
    }

    /// `λ·f`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let f = self.f.clone();
        Self {
            label: format!("{lambda}*{}", self.label),
            f: real_fn(move |t| lambda * f(t)),
            support: self.support,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Breakpoints plus support ends, sorted.
    fn kinks(&self) -> Vec<f64> {
        let mut k = self.breakpoints.clone();
        k.push(self.support.0);
        k.push(self.support.1);
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// Names accepted by [`Forcing::from_label`].
    pub const LABELS: &'static str =
        "indicator01, indicator11, gauss, triangle, bump, gauss+5, gauss-5, gauss+10, gauss-10, zero";

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "indicator01" => Self::indicator(0.0, 1.0),
            "indicator11" => Self::indicator(-1.0, 1.0),
            "gauss" => Ok(Self::gaussian(0.0)),
            "triangle" => Self::triangle(0.0, 1.0),
            "bump" => Self::bump(0.0, 3.0),
            "gauss+5" => Ok(Self::gaussian(5.0)),
            "gauss-5" => Ok(Self::gaussian(-5.0)),
            "gauss+10" => Ok(Self::gaussian(10.0)),
            "gauss-10" => Ok(Self::gaussian(-10.0)),
            "zero" => Ok(Self::zero()),
            other => Err(Error::Configuration(format!("unknown forcing '{other}' (known: {})", Self::LABELS))),
        }
    }
}

/// The fixed eight-member test family: two indicators, a Gaussian, a hat and
/// Gaussians shifted to `±5`, `±10`.
pub fn standard_family() -> Vec<Forcing> {
    ["indicator01", "indicator11", "gauss", "triangle", "gauss+5", "gauss-5", "gauss+10", "gauss-10"]
        .iter()
        .map(|l| Forcing::from_label(l).expect("family labels are valid"))
        .collect()
}

/// The weight `θ` of `L_{p,θ}`.
#[derive(Clone)]
pub enum Weight {
    One,
    Constant(f64),
    /// `θ = q* = 1/d`.
    QStar(CoefficientFunction),
    Custom { label: String, f: RealFn },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Weight {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            Weight::One => 1.0,
            Weight::Constant(c) => *c,
            Weight::QStar(q) => d_of_x(q, t, DEFAULT_D_TOL)?.q_star(),
            Weight::Custom { f, .. } => f(t),
        };
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("weight must be positive, got {v} at t = {t}")))
        }
    }

    pub fn label(&self) -> String {
        match self {
            Weight::One => "one".into(),
            Weight::Constant(c) => format!("const:{c}"),
            Weight::QStar(q) => format!("qstar[{}]", q.label()),
            Weight::Custom { label, .. } => label.clone(),
        }
    }
}

/// `p`, its conjugate `p′` and the weight `θ` of `L_{p,θ}`.
#[derive(Debug, Clone)]
pub struct SpaceParams {
    pub p: f64,
    /// `+∞` when `p = 1`.
    pub p_conjugate: f64,
    pub theta: Weight,
}

impl SpaceParams {
    pub fn new(p: f64, theta: Weight) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::domain(format!("p must lie in [1, inf), got {p}")));
        }
        let p_conjugate = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(Self { p, p_conjugate, theta })
    }

    /// `1/p′`, zero when `p = 1`.
    pub fn inv_conjugate(&self) -> f64 {
        1.0 - 1.0 / self.p
    }
}

/// `(Gf)(x)`, truncated by the exponent cutoff or the end of the support.
pub fn green_apply(q: &CoefficientFunction, f: &Forcing, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let (lo, hi) = f.support;
    if x >= hi {
        return Ok(0.0);
    }
    // Across the zero stretch before the support only the exponent moves.
    let (start, damping) = if x < lo { (lo, (-q.integrate(x, lo)?).exp()) } else { (x, 1.0) };
    if damping == 0.0 {
        return Ok(0.0);
    }
    let walk = Walk {
        start,
        direction: Direction::Forward,
        initial_step: (hi - start).min(1.0),
        stop_at: Some(hi),
        breakpoints: &f.breakpoints,
    };
    let tail = walk_tail(&Mass { q, origin: start }, |t| Ok(f.eval(t)), &walk, cfg)?;
    Ok(damping * tail.value)
}

/// `y = Gf` with `y(lo)` cached, so that `y(x) = e^{−∫_x^{lo} q}·y(lo)` left of the support.
pub struct GreenSolution<'a> {
    q: &'a CoefficientFunction,
    f: &'a Forcing,
    cfg: QuadratureConfig,
    y_lo: f64,
}

impl<'a> GreenSolution<'a> {
    pub fn new(q: &'a CoefficientFunction, f: &'a Forcing, cfg: &QuadratureConfig) -> Result<Self> {
        let y_lo = green_apply(q, f, f.support.0, cfg)?;
        Ok(Self { q, f, cfg: *cfg, y_lo })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let lo = self.f.support.0;
        if x < lo {
            Ok((-self.q.integrate(x, lo)?).exp() * self.y_lo)
        } else {
            green_apply(self.q, self.f, x, &self.cfg)
        }
    }
}

/// Tolerances for finite differencing of `Gf`: quadrature noise must stay
/// well below the `O(h²)` truncation error.
pub fn residual_config() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerances(1e-15, 1e-13)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub h: f64,
    pub rows: Vec<ResidualRow>,
    pub max_residual: f64,
    pub argmax: f64,
}

/// `max |−y′ + q y − f|` over `x_grid`, with `y = Gf` and `y′` by central differences.
pub fn residual_check(q: &CoefficientFunction, f: &Forcing, x_grid: &[f64], h: f64) -> Result<ResidualReport> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("finite-difference step must be positive, got {h}")));
    }
    let cfg = residual_config();
    let rows = sweep(x_grid, |x| {
        let y = green_apply(q, f, x, &cfg)?;
        let yp = (green_apply(q, f, x + h, &cfg)? - green_apply(q, f, x - h, &cfg)?) / (2.0 * h);
        Ok(ResidualRow { x, y, residual: (-yp + q.eval(x) * y - f.eval(x)).abs() })
    })?;
    let (argmax, max_residual) = rows
        .iter()
        .fold((f64::NAN, 0.0), |acc, r| if r.residual > acc.1 || acc.0.is_nan() { (r.x, r.residual) } else { acc });
    Ok(ResidualReport { h, rows, max_residual, argmax })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRate {
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`; about 4 for a second-order scheme.
    pub ratio: f64,
}

/// Residuals at steps `h` and `h/2`.
pub fn residual_rate(q: &CoefficientFunction, f: &Forcing, x_grid: &[f64], h: f64) -> Result<ResidualRate> {
    let coarse = residual_check(q, f, x_grid, h)?.max_residual;
    let fine = residual_check(q, f, x_grid, 0.5 * h)?.max_residual;
    Ok(ResidualRate { coarse, fine, ratio: coarse / fine })
}

/// `M(x) = ∫_{−∞}^x θ(t) e^{−∫_t^x q} dt`.
pub fn m_of_x(q: &CoefficientFunction, theta: &Weight, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let tail = walk_tail(&Mass { q, origin: x }, |t| theta.eval(t), &unit_walk(x, Direction::Backward), cfg)?;
    Ok(tail.value)
}

/// `(argmax, max)` of `M` over `grid`.
pub fn sup_m(q: &CoefficientFunction, theta: &Weight, grid: &[f64], cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let values = sweep(grid, |x| m_of_x(q, theta, x, cfg))?;
    Ok(grid
        .iter()
        .copied()
        .zip(values)
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, (x, m)| if m > acc.1 { (x, m) } else { acc }))
}

/// `(∫_{−W}^{W} |θ f|^p)^{1/p}`, splitting at `breaks`.
pub fn lp_theta_norm<F>(f: F, sp: &SpaceParams, window: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(window > 0.0) {
        return Err(Error::domain(format!("window must be positive, got {window}")));
    }
    let p = sp.p;
    let r = try_integrate_split(
        |t| {
            let v = f(t)?;
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok((sp.theta.eval(t)? * v).abs().powf(p))
        },
        -window,
        window,
        breaks,
        cfg,
    )?;
    Ok(r.value.max(0.0).powf(1.0 / p))
}

/// `||f||_{p,θ}` on `[−W, W] ∩ support`.
pub fn forcing_norm(f: &Forcing, sp: &SpaceParams, window: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (lo, hi) = (f.support.0.max(-window), f.support.1.min(window));
    if lo >= hi {
        return Ok(0.0);
    }
    let p = sp.p;
    let r = try_integrate_split(
        |t| {
            let v = f.eval(t);
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok((sp.theta.eval(t)? * v).abs().powf(p))
        },
        lo,
        hi,
        &f.kinks(),
        cfg,
    )?;
    Ok(r.value.max(0.0).powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseBound {
    /// Smallest `C` with `|Gf(x)| ≤ C·d(x)^{1/p′}·||f||_p` on the grid.
    pub c: f64,
    pub argmax: f64,
    pub f_norm: f64,
}

/// Hölder-type pointwise bound `|Gf(x)| ≤ C·d(x)^{1/p′}·||f||_p`.
pub fn pointwise_bound_check(
    q: &CoefficientFunction,
    f: &Forcing,
    sp: &SpaceParams,
    x_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<PointwiseBound> {
    let unweighted = SpaceParams::new(sp.p, Weight::One)?;
    let span = f.support.0.abs().max(f.support.1.abs()).max(1.0);
    let f_norm = forcing_norm(f, &unweighted, span, cfg)?;
    if f_norm == 0.0 {
        return Ok(PointwiseBound { c: 0.0, argmax: f64::NAN, f_norm });
    }
    let ratios = sweep(x_grid, |x| {
        let y = green_apply(q, f, x, cfg)?;
        let d = d_of_x(q, x, DEFAULT_D_TOL)?.d;
        Ok(y.abs() / (d.powf(sp.inv_conjugate()) * f_norm))
    })?;
    let (argmax, c) = x_grid
        .iter()
        .copied()
        .zip(ratios)
        .fold((f64::NAN, 0.0), |acc, (x, r)| if r > acc.1 { (x, r) } else { acc });
    Ok(PointwiseBound { c, argmax, f_norm })
}

/// `z(x) = α·e^{∫_{x0}^x q}`, kept with its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneousValue {
    /// May be `±∞` when the exponent overflows.
    pub value: f64,
    /// `ln |z(x)|`; `−∞` when `α = 0`.
    pub log_abs: f64,
    pub sign: f64,
}

pub fn homogeneous_z(q: &CoefficientFunction, x0: f64, alpha: f64, x: f64) -> Result<HomogeneousValue> {
    if alpha == 0.0 {
        return Ok(HomogeneousValue { value: 0.0, log_abs: f64::NEG_INFINITY, sign: 0.0 });
    }
    let log_abs = alpha.abs().ln() + q.integrate_signed(x0, x)?;
    let sign = alpha.signum();
    Ok(HomogeneousValue { value: sign * log_abs.exp(), log_abs, sign })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// `(X, ln ||z||_{p,θ} on [−X, X])`.
    pub log_norms: Vec<(f64, f64)>,
    pub ratio_floor: f64,
    /// Each norm exceeds `ratio_floor` times the previous one.
    pub grows: bool,
    pub trivial: bool,
}

/// `ln ||z||_{p,θ}` on `[−X, X]` for each window, by panelled log-sum-exp.
pub fn homogeneous_divergence_check(
    q: &CoefficientFunction,
    sp: &SpaceParams,
    alpha: f64,
    x0: f64,
    windows: &[f64],
    ratio_floor: f64,
) -> Result<DivergenceReport> {
    if windows.is_empty() || windows.iter().any(|w| !(*w > 0.0)) || windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("windows must be positive and strictly increasing"));
    }
    if alpha == 0.0 {
        return Ok(DivergenceReport {
            log_norms: windows.iter().map(|&w| (w, f64::NEG_INFINITY)).collect(),
            ratio_floor,
            grows: false,
            trivial: true,
        });
    }
    let p = sp.p;
    let log_alpha = alpha.abs().ln();
    let log_integrand = |t: f64| -> Result<f64> { Ok(p * (sp.theta.eval(t)?.ln() + log_alpha + q.integrate_signed(x0, t)?)) };
    let cfg = QuadratureConfig::default();

    let mut log_norms = Vec::with_capacity(windows.len());
    for &w in windows {
        let h = 2.0 * w / LOG_NORM_PANELS as f64;
        let edges: Vec<f64> = (0..=LOG_NORM_PANELS).map(|k| -w + h * k as f64).collect();
        let pieces = sweep(&edges[..LOG_NORM_PANELS], |a| {
            let b = a + h;
            let reference = log_integrand(a)?.max(log_integrand(b)?).max(log_integrand(0.5 * (a + b))?);
            let r = try_integrate_adaptive(|t| Ok((log_integrand(t)? - reference).exp()), a, b, &cfg)?;
            Ok(reference + r.value.ln())
        })?;
        let top = pieces.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = pieces.iter().map(|l| (l - top).exp()).sum();
        log_norms.push((w, (top + sum.ln()) / p));
    }
    let step = ratio_floor.ln();
    let grows = log_norms.windows(2).all(|w| w[1].1 > w[0].1 + step);
    Ok(DivergenceReport { log_norms, ratio_floor, grows, trivial: false })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityRow {
    pub label: String,
    /// `||f||_p` on the window.
    pub f_norm: f64,
    /// `||Gf||_{p,θ}` on the window.
    pub y_norm: f64,
    /// `None` when `f` vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub p: f64,
    pub theta: String,
    pub window: f64,
    /// Largest ratio over the family: an empirical lower bound on `c(p)`.
    pub c_estimate: f64,
    pub per_f: Vec<AdmissibilityRow>,
    pub notes: Vec<String>,
}

/// `||Gf||_{p,θ} / ||f||_p` on `[−W, W]` for each member of `family`.
pub fn admissibility_estimate(
    q: &CoefficientFunction,
    sp: &SpaceParams,
    family: &[Forcing],
    window: f64,
    cfg: &QuadratureConfig,
) -> Result<AdmissibilityReport> {
    let unweighted = SpaceParams::new(sp.p, Weight::One)?;
    let mut per_f = Vec::with_capacity(family.len());
    let mut notes = Vec::new();
    for f in family {
        let f_norm = forcing_norm(f, &unweighted, window, cfg)?;
        if f_norm == 0.0 {
            notes.push(format!("{}: zero norm on the window, skipped", f.label));
            per_f.push(AdmissibilityRow { label: f.label.clone(), f_norm, y_norm: 0.0, ratio: None });
            continue;
        }
        let y = GreenSolution::new(q, f, cfg)?;
        // y vanishes right of the support; left of it the decay is fast.
        let y_norm = if f.support.1 <= -window {
            0.0
        } else {
            let right = f.support.1.min(window);
            let sub = SpaceParams { p: sp.p, p_conjugate: sp.p_conjugate, theta: sp.theta.clone() };
            let breaks: Vec<f64> = f.kinks().into_iter().filter(|&k| k < right).collect();
            lp_theta_norm(|t| if t > right { Ok(0.0) } else { y.eval(t) }, &sub, window, &breaks, cfg)?
        };
        per_f.push(AdmissibilityRow { label: f.label.clone(), f_norm, y_norm, ratio: Some(y_norm / f_norm) });
    }
    let c_estimate = per_f.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    Ok(AdmissibilityReport { p: sp.p, theta: sp.theta.label(), window, c_estimate, per_f, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::catalog::*;
    use approx::assert_abs_diff_eq;

    const GAMMA_4_3: f64 = 0.892_979_511_569_249_2;

    fn cube3() -> CoefficientFunction {
        CoefficientFunction::new("3t^2", |t| 3.0 * t * t)
    }

    #[test]
    fn constant_kernel_integrals() {
        let q = constant(1.0).unwrap();
        let cfg = QuadratureConfig::default();
        for x in [-3.0, 0.0, 7.0] {
            assert_abs_diff_eq!(j_of_x(&q, x, &cfg).unwrap(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(i_of_x(&q, x, &cfg).unwrap(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(s_of_x(&q, x, &cfg).unwrap(), 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn cubic_kernel_integrals() {
        let q = cube3();
        let cfg = QuadratureConfig::default();
        assert_abs_diff_eq!(j_of_x(&q, 0.0, &cfg).unwrap(), GAMMA_4_3, epsilon = 1e-9);
        assert_abs_diff_eq!(i_of_x(&q, 0.0, &cfg).unwrap(), GAMMA_4_3, epsilon = 1e-9);
        assert_abs_diff_eq!(s_of_x(&q, 0.0, &cfg).unwrap(), 2.0 * GAMMA_4_3, epsilon = 1e-9);
    }

    #[test]
    fn even_coefficient_mirrors_i_and_j() {
        let q = square();
        let cfg = QuadratureConfig::default();
        let i = i_of_x(&q, 2.5, &cfg).unwrap();
        let j = j_of_x(&q, -2.5, &cfg).unwrap();
        assert_abs_diff_eq!(i, j, epsilon = 1e-12);
    }

    #[test]
    fn example2_j_lies_between_bounds() {
        let q = example2();
        let cfg = QuadratureConfig::default();
        let row = kernel_row(&q, 10.0, &cfg).unwrap();
        assert!(row.j >= (-2.0f64).exp() * row.d && row.j <= 20.0 * row.d, "{row:?}");
        assert_eq!(row.s, row.i + row.j);
    }

    #[test]
    fn vanishing_coefficient_is_divergence_suspect() {
        let q = constant(0.0).unwrap();
        let cfg = QuadratureConfig::default().with_horizon(1e3);
        assert!(j_of_x(&q, 0.0, &cfg).unwrap_err().is_divergence_suspect());
    }

    #[test]
    fn green_closed_forms() {
        let q = constant(1.0).unwrap();
        let f = Forcing::indicator(0.0, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(green_apply(&q, &f, 0.0, &cfg).unwrap(), 1.0 - 1.0 / e, epsilon = 1e-12);
        assert_abs_diff_eq!(green_apply(&q, &f, -1.0, &cfg).unwrap(), 1.0 / e - 1.0 / (e * e), epsilon = 1e-12);
        assert_eq!(green_apply(&q, &f, 1.5, &cfg).unwrap(), 0.0);
        let two = f.scaled(2.0);
        for x in [-0.5, 0.25, 0.9] {
            let a = green_apply(&q, &two, x, &cfg).unwrap();
            let b = green_apply(&q, &f, x, &cfg).unwrap();
            assert_abs_diff_eq!(a, 2.0 * b, epsilon = 1e-10);
        }
        let sol = GreenSolution::new(&q, &f, &cfg).unwrap();
        assert_abs_diff_eq!(sol.eval(-1.0).unwrap(), 1.0 / e - 1.0 / (e * e), epsilon = 1e-12);
    }

    #[test]
    fn residuals() {
        let one = constant(1.0).unwrap();
        let grid = crate::grid::linspace(-2.0, 2.0, 21);
        let r = residual_check(&one, &Forcing::gaussian(0.0), &grid, DEFAULT_FD_STEP).unwrap();
        assert!(r.max_residual <= 1e-4, "{}", r.max_residual);
        let r = residual_check(&one, &Forcing::zero(), &grid, DEFAULT_FD_STEP).unwrap();
        assert_eq!(r.max_residual, 0.0);
        let q = example2();
        let bump = Forcing::bump(0.0, 3.0).unwrap();
        let grid = crate::grid::linspace(-3.0, 3.0, 25);
        let rate = residual_rate(&q, &bump, &grid, DEFAULT_FD_STEP).unwrap();
        assert!(rate.coarse <= 1e-3, "{rate:?}");
        assert!((3.0..=5.0).contains(&rate.ratio), "{rate:?}");
    }

    #[test]
    fn m_for_constant_data() {
        let q = constant(2.0).unwrap();
        let cfg = QuadratureConfig::default();
        for x in [-4.0, 0.0, 3.0] {
            assert_abs_diff_eq!(m_of_x(&q, &Weight::Constant(3.0), x, &cfg).unwrap(), 1.5, epsilon = 1e-9);
        }
        let one = constant(1.0).unwrap();
        assert_abs_diff_eq!(m_of_x(&one, &Weight::One, 1.0, &cfg).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn example2_sup_m_is_stable() {
        let q = example2();
        let cfg = QuadratureConfig::default();
        let w = Weight::QStar(q.clone());
        let (_, coarse) = sup_m(&q, &w, &crate::grid::linspace(-20.0, 20.0, 201), &cfg).unwrap();
        let (_, fine) = sup_m(&q, &w, &crate::grid::linspace(-20.0, 20.0, 401), &cfg).unwrap();
        assert!(coarse.is_finite() && (fine - coarse).abs() <= 0.01 * coarse, "{coarse} {fine}");
    }

    #[test]
    fn norms() {
        let cfg = QuadratureConfig::default();
        let two = SpaceParams::new(2.0, Weight::One).unwrap();
        let ind = Forcing::indicator(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(forcing_norm(&ind, &two, 5.0, &cfg).unwrap(), 1.0, epsilon = 1e-12);
        let one_w2 = SpaceParams::new(1.0, Weight::Constant(2.0)).unwrap();
        assert_abs_diff_eq!(forcing_norm(&ind, &one_w2, 5.0, &cfg).unwrap(), 2.0, epsilon = 1e-12);
        let g = lp_theta_norm(|t: f64| Ok((-t * t).exp()), &two, 10.0, &[], &cfg).unwrap();
        assert_abs_diff_eq!(g, std::f64::consts::FRAC_PI_2.powf(0.25), epsilon = 1e-10);
        assert!(SpaceParams::new(0.5, Weight::One).is_err());
        assert_eq!(SpaceParams::new(1.0, Weight::One).unwrap().inv_conjugate(), 0.0);
        assert_eq!(SpaceParams::new(2.0, Weight::One).unwrap().p_conjugate, 2.0);
    }

    #[test]
    fn pointwise_bounds() {
        let q = constant(1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let sp = SpaceParams::new(2.0, Weight::One).unwrap();
        let grid = crate::grid::linspace(-5.0, 5.0, 41);
        let r = pointwise_bound_check(&q, &Forcing::indicator(0.0, 1.0).unwrap(), &sp, &grid, &cfg).unwrap();
        assert!(r.c > 0.0 && r.c <= 2.0, "{r:?}");
        let r = pointwise_bound_check(&q, &Forcing::zero(), &sp, &grid, &cfg).unwrap();
        assert_eq!(r.c, 0.0);
    }

    #[test]
    fn homogeneous_values() {
        let q = constant(1.0).unwrap();
        assert_eq!(homogeneous_z(&q, 0.0, 0.0, 5.0).unwrap().value, 0.0);
        assert_abs_diff_eq!(homogeneous_z(&q, 0.0, 1.0, 3.0).unwrap().value, 3f64.exp(), epsilon = 1e-12);
        let q2 = example2();
        let logs: Vec<f64> = [1.5, 2.0, 4.0, 8.0].iter().map(|&x| homogeneous_z(&q2, 1.0, 1.0, x).unwrap().log_abs).collect();
        assert!(logs.windows(2).all(|w| w[1] > w[0]));
        let far = homogeneous_z(&q2, 0.0, 1.0, 20.0).unwrap();
        assert!(far.value.is_infinite() && far.log_abs > 7000.0);
    }

    #[test]
    fn homogeneous_norm_grows() {
        let q = constant(1.0).unwrap();
        let sp = SpaceParams::new(1.0, Weight::One).unwrap();
        let r = homogeneous_divergence_check(&q, &sp, 1.0, 0.0, &[10.0, 20.0], 2.0).unwrap();
        assert!(r.grows);
        assert_abs_diff_eq!(r.log_norms[1].1 - r.log_norms[0].1, 10.0, epsilon = 1e-6);
        let r = homogeneous_divergence_check(&q, &sp, 0.0, 0.0, &[10.0, 20.0], 2.0).unwrap();
        assert!(r.trivial && !r.grows);
        let q2 = example2();
        let sp = SpaceParams::new(2.0, Weight::QStar(q2.clone())).unwrap();
        let r = homogeneous_divergence_check(&q2, &sp, 1.0, 0.0, &[3.0, 5.0, 8.0], 2.0).unwrap();
        assert!(r.grows, "{r:?}");
    }

    #[test]
    fn admissibility_constant() {
        let q = constant(1.0).unwrap();
        let cfg = QuadratureConfig::default();
        let sp = SpaceParams::new(2.0, Weight::One).unwrap();
        let fam = vec![Forcing::indicator(0.0, 1.0).unwrap(), Forcing::zero()];
        let r = admissibility_estimate(&q, &sp, &fam, 20.0, &cfg).unwrap();
        assert!(r.c_estimate > 0.0 && r.c_estimate <= 1.0, "{r:?}");
        assert_eq!(r.per_f[1].ratio, None);
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn family_is_fixed() {
        let fam = standard_family();
        assert_eq!(fam.len(), 8);
        assert!(Forcing::from_label("nope").is_err());
    }
}
