//! Diagnostics for the class `K(γ)`: the functionals `κ₁`, `κ₂`, the formula
//! `γ(a, b) = a·e^{−b/a²}`, empirical `(a, b)` and the conclusion
//! `q₁(x)d(x) = 1 + ε(x)` with `|ε| ≤ κ₁ + κ₂`.

use serde::Serialize;

use crate::average::{d_of_x, DEFAULT_D_TOL};
use crate::coefficient::{CoefficientFunction, Decomposition, SmoothPart};
use crate::error::{Error, Result};
use crate::grid::sweep;
use crate::quadrature::{integrate_adaptive, QuadratureConfig};

/// Default size of the `ξ` grid in the `κ` suprema.
pub const XI_GRID_N: usize = 257;
/// Magnitudes at which the limit hypotheses are probed.
pub const TREND_PROBES: [f64; 4] = [10.0, 30.0, 100.0, 300.0];
/// Slack allowed in `|ε| ≤ κ₁ + κ₂`.
pub const EPSILON_SLACK: f64 = 1e-6;
/// Points per `t`-window in [`estimate_ab`] when called from [`membership_report`].
pub const T_GRID_N: usize = 33;
/// Largest `b` tried by [`membership_report`].
pub const MAX_B: f64 = 64.0;

const GOLDEN_ITERS: usize = 60;

/// `γ(a, b) = a·e^{−b/a²}` for `a ≥ 1`, `b > 0`.
pub fn gamma_of_ab(a: f64, b: f64) -> Result<f64> {
    if !(a >= 1.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("gamma needs a >= 1 and b > 0, got a = {a}, b = {b}")));
    }
    Ok(a * (-b / (a * a)).exp())
}

/// Maximum of `f` on `[lo, hi]`: best of an `n`-point grid, then golden-section
/// refinement between the neighbours of the grid maximum.
fn sup_on<F>(f: F, lo: f64, hi: f64, n: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let n = n.max(3);
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f(lo)?);
    let mut best_i = 0;
    for i in 1..n {
        let s = if i == n - 1 { hi } else { lo + h * i as f64 };
        let v = f(s)?;
        if v > best.1 {
            best = (s, v);
            best_i = i;
        }
    }
    if h <= 0.0 {
        return Ok(best);
    }
    let mut a = lo + h * best_i.saturating_sub(1) as f64;
    let mut b = (lo + h * (best_i + 1) as f64).min(hi);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut e = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fe = f(e)?;
    for _ in 0..GOLDEN_ITERS {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + r * (b - a);
            fe = f(e)?;
        }
    }
    for (s, v) in [(c, fc), (e, fe)] {
        if v > best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}

fn xi_radius(q1: &SmoothPart, x: f64) -> Result<(f64, f64)> {
    let v = q1.eval(x);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(format!("q1 must be positive, got {v} at x = {x}")));
    }
    Ok((v, 2.0 / v))
}

/// `κ₁(x) = q₁(x)^{−2}·sup_{|ξ| ≤ 2/q₁(x)} |q₁′(x+ξ) − q₁′(x−ξ)|`.
pub fn kappa1(q1: &SmoothPart, x: f64, xi_grid_n: usize) -> Result<f64> {
    let (v, r) = xi_radius(q1, x)?;
    let (_, sup) = sup_on(|xi| Ok((q1.deriv(x + xi) - q1.deriv(x - xi)).abs()), 0.0, r, xi_grid_n)?;
    Ok(sup / (v * v))
}

/// `κ₂(x) = sup_{|ξ| ≤ 2/q₁(x)} |∫_{x−ξ}^{x+ξ} q₂|`.
pub fn kappa2<Q2>(q1: &SmoothPart, q2: Q2, x: f64, xi_grid_n: usize) -> Result<f64>
where
    Q2: Fn(f64) -> f64,
{
    let (_, r) = xi_radius(q1, x)?;
    let cfg = QuadratureConfig::oscillatory();
    let n = xi_grid_n.max(3);
    let h = r / (n - 1) as f64;

    // Cumulative sweep over the ξ grid.
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut best = (0.0, 0.0_f64);
    let mut best_i = 0;
    for i in 1..n {
        let xi = if i == n - 1 { r } else { h * i as f64 };
        acc += integrate_adaptive(&q2, x + prev, x + xi, &cfg)?.value;
        acc += integrate_adaptive(&q2, x - xi, x - prev, &cfg)?.value;
        if acc.abs() > best.1 {
            best = (xi, acc.abs());
            best_i = i;
        }
        prev = xi;
    }
    let lo = h * best_i.saturating_sub(1) as f64;
    let hi = (h * (best_i + 1) as f64).min(r);
    let direct = |xi: f64| -> Result<f64> {
        if xi <= 0.0 {
            return Ok(0.0);
        }
        Ok(integrate_adaptive(&q2, x - xi, x + xi, &cfg)?.value.abs())
    };
    let (_, refined) = sup_on(direct, lo, hi, 5)?;
    Ok(best.1.max(refined))
}

/// Smallest `a ≥ 1` with `a⁻¹d(x) ≤ d(t) ≤ a·d(x)` on sampled pairs
/// `|t − x| ≤ b·d(x)`, `x ∈ x_grid`.
pub fn estimate_ab(q: &CoefficientFunction, x0: f64, b: f64, x_grid: &[f64], t_grid_n: usize) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::domain(format!("b must be positive, got {b}")));
    }
    if let Some(&x) = x_grid.iter().find(|x| x.abs() < x0) {
        return Err(Error::domain(format!("probe x = {x} lies inside |x| < x0 = {x0}")));
    }
    let t_n = t_grid_n.max(2);
    let per_x = sweep(x_grid, |x| {
        let dx = d_of_x(q, x, DEFAULT_D_TOL)?.d;
        let half = b * dx;
        let mut a: f64 = 1.0;
        for j in 0..t_n {
            let t = x - half + 2.0 * half * j as f64 / (t_n - 1) as f64;
            let dt = d_of_x(q, t, DEFAULT_D_TOL)?.d;
            a = a.max(dt / dx).max(dx / dt);
        }
        Ok(a)
    })?;
    Ok(per_x.into_iter().fold(1.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbChoice {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

/// Doubles `b` from 1 until `γ(a(b), b) ≤ e^{−1}` or `max_b` is passed; the
/// last pair tried is returned either way.
pub fn search_ab(q: &CoefficientFunction, x0: f64, x_grid: &[f64], t_grid_n: usize, max_b: f64) -> Result<AbChoice> {
    let mut b = 1.0;
    loop {
        let a = estimate_ab(q, x0, b, x_grid, t_grid_n)?;
        let gamma = gamma_of_ab(a, b)?;
        if gamma <= (-1.0f64).exp() || 2.0 * b > max_b {
            return Ok(AbChoice { a, b, gamma });
        }
        b *= 2.0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KVerdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub x: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    /// `q₁(x)d(x) − 1`.
    pub epsilon: f64,
    /// `q*(x)/q₁(x)`.
    pub q_star_over_q1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendProbe {
    pub name: String,
    /// `(|x|, value)` for `x` and `−x` collapsed to the larger value.
    pub samples: Vec<(f64, f64)>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KGammaReport {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub gamma: f64,
    pub rows: Vec<ProbeRow>,
    /// Probe points with `|x| ≥ x0` where `|ε| > κ₁ + κ₂ + slack`.
    pub epsilon_violations: Vec<f64>,
    pub q_star_over_q1_range: (f64, f64),
    pub trends: Vec<TrendProbe>,
    pub verdict: KVerdict,
}

impl KGammaReport {
    pub fn kappa1_trace(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.x, r.kappa1)).collect()
    }

    pub fn kappa2_trace(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.x, r.kappa2)).collect()
    }

    pub fn epsilon_trace(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.x, r.epsilon)).collect()
    }
}

fn decomposition(q: &CoefficientFunction) -> Result<&Decomposition> {
    q.decomposition()
        .ok_or_else(|| Error::Configuration(format!("coefficient '{}' has no q1 + q2 decomposition", q.label())))
}

/// One probe row at `x`.
pub fn probe(q: &CoefficientFunction, x: f64, xi_grid_n: usize) -> Result<ProbeRow> {
    let dec = decomposition(q)?;
    let q1 = &dec.smooth;
    let k1 = kappa1(q1, x, xi_grid_n)?;
    let k2 = kappa2(q1, |t| dec.remainder(t), x, xi_grid_n)?;
    let d = d_of_x(q, x, DEFAULT_D_TOL)?.d;
    let q1x = q1.eval(x);
    Ok(ProbeRow {
        x,
        kappa1: k1,
        kappa2: k2,
        epsilon: q1x * d - 1.0,
        q_star_over_q1: 1.0 / (d * q1x),
    })
}

fn trend<F>(name: &str, increasing: bool, f: F) -> Result<TrendProbe>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut samples = Vec::with_capacity(TREND_PROBES.len());
    for &m in &TREND_PROBES {
        samples.push((m, f(m)?.max(f(-m)?)));
    }
    let holds = samples.windows(2).all(|w| if increasing { w[1].1 > w[0].1 } else { w[1].1 <= w[0].1 });
    Ok(TrendProbe { name: name.to_string(), samples, holds })
}

/// Evaluates `κ₁`, `κ₂`, `ε` and `q*/q₁` on `probe_grid`, the limit
/// hypotheses as trends at `|x| ∈ TREND_PROBES`, and an empirical `(a, b)`.
///
/// The verdict rests on `|ε| ≤ κ₁ + κ₂ + slack` for `|x| ≥ x0` and on the
/// trend probes; `a`, `b` and `γ` are informational.
pub fn membership_report(q: &CoefficientFunction, x0: f64, probe_grid: &[f64]) -> Result<KGammaReport> {
    let dec = decomposition(q)?;
    let rows = sweep(probe_grid, |x| probe(q, x, XI_GRID_N))?;

    let epsilon_violations: Vec<f64> = rows
        .iter()
        .filter(|r| r.x.abs() >= x0 && r.epsilon.abs() > r.kappa1 + r.kappa2 + EPSILON_SLACK)
        .map(|r| r.x)
        .collect();
    let q_star_over_q1_range = rows
        .iter()
        .filter(|r| r.x.abs() >= x0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.q_star_over_q1), hi.max(r.q_star_over_q1)));

    let q1 = &dec.smooth;
    let trends = vec![
        trend("kappa1+kappa2", false, |x| Ok(kappa1(q1, x, XI_GRID_N)? + kappa2(q1, |t| dec.remainder(t), x, XI_GRID_N)?))?,
        trend("|q1'|/q1^2", false, |x| {
            let v = q1.eval(x);
            Ok(q1.deriv(x).abs() / (v * v))
        })?,
        trend("|x|*q1", true, |x| Ok(x.abs() * q1.eval(x)))?,
    ];

    let far: Vec<f64> = probe_grid.iter().copied().filter(|x| x.abs() >= x0).collect();
    let ab = if far.is_empty() {
        AbChoice { a: 1.0, b: 1.0, gamma: gamma_of_ab(1.0, 1.0)? }
    } else {
        search_ab(q, x0, &far, T_GRID_N, MAX_B)?
    };

    let verdict = if !epsilon_violations.is_empty() {
        KVerdict::Inconsistent
    } else if trends.iter().all(|t| t.holds) {
        KVerdict::Consistent
    } else {
        KVerdict::Inconclusive
    };

    Ok(KGammaReport {
        a: ab.a,
        b: ab.b,
        x0,
        gamma: ab.gamma,
        rows,
        epsilon_violations,
        q_star_over_q1_range,
        trends,
        verdict,
    })
}
