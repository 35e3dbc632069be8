//! Evaluation grids and ordered parallel sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Beyond this magnitude log grids switch from uniform to geometric spacing.
pub const LOG_CORE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Uniform,
    Log,
}

impl std::str::FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Spacing::Uniform),
            "log" => Ok(Spacing::Log),
            other => Err(Error::domain(format!("unknown spacing '{other}' (uniform|log)"))),
        }
    }
}

/// `n` equispaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|k| if k + 1 == n { hi } else { lo + step * k as f64 })
                .collect()
        }
    }
}

/// `n` points on `[from, to]` (`0 < from < to`) with constant ratio.
pub fn geomspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    linspace(from.ln(), to.ln(), n)
        .into_iter()
        .enumerate()
        .map(|(k, l)| if k == 0 { from } else if k + 1 == n { to } else { l.exp() })
        .collect()
}

/// Symmetric grid on `[-window, window]` with `n ≥ 3` points.
///
/// `Log` spacing is uniform on `[-10, 10]` and geometric beyond, with a
/// quarter of the points in each tail.
pub fn grid(window: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::domain(format!("window must be positive, got {window}")));
    }
    if n < 3 {
        return Err(Error::domain(format!("grid needs at least 3 points, got {n}")));
    }
    match spacing {
        Spacing::Log if window > LOG_CORE => {
            let tail = (n / 4).max(1);
            let core = n - 2 * tail;
            let core = core.max(3);
            let far = geomspace(LOG_CORE, window, tail + 1);
            let mut out: Vec<f64> = far[1..].iter().rev().map(|&x| -x).collect();
            out.extend(linspace(-LOG_CORE, LOG_CORE, core));
            out.extend_from_slice(&far[1..]);
            Ok(out)
        }
        _ => Ok(linspace(-window, window, n)),
    }
}

/// Maps `f` over `points` in parallel, keeping order; the first error in
/// grid order wins so failures are reproducible.
pub fn sweep<T, F>(points: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = points.par_iter().map(|&x| f(x)).collect();
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_is_symmetric() {
        let g = grid(5.0, 11, Spacing::Uniform).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], -5.0);
        assert_eq!(g[10], 5.0);
        assert_eq!(g[5], 0.0);
    }

    #[test]
    fn log_grid_reaches_window_monotonically() {
        let g = grid(100.0, 101, Spacing::Log).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(*g.first().unwrap(), -100.0);
        assert_eq!(*g.last().unwrap(), 100.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.contains(&10.0) && g.contains(&-10.0));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(grid(0.0, 11, Spacing::Uniform).is_err());
        assert!(grid(1.0, 2, Spacing::Uniform).is_err());
    }

    #[test]
    fn sweep_reports_first_error_in_order() {
        let pts = [0.0, 1.0, 2.0, 3.0];
        let r = sweep(&pts, |x| if x >= 2.0 { Err(Error::domain(format!("{x}"))) } else { Ok(x) });
        assert_eq!(r.unwrap_err(), Error::domain("2"));
    }
}
