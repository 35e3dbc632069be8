//! Versioned regression anchors and tolerances used by the acceptance suite
//! and the `suite` subcommand.
//!
//! The anchors (`20`, `10`, `25`, `5/|x|`) were fixed after a first measured
//! run; they guard against regressions and are not mathematical constants.

/// Bumped whenever a value below changes.
pub const VERSION: &str = "expectations-v1";

/// `d`, `q*` tolerance for `q ≡ 1`.
pub const CONST_D_TOL: f64 = 1e-9;
/// `I`, `J`, `S`, `M` tolerance for `q ≡ 1`.
pub const CONST_KERNEL_TOL: f64 = 1e-6;
pub const CONST_POINTS: [f64; 3] = [-3.0, 0.0, 7.0];

/// `|d(x)(3x² + 1) − 1| ≤ EXAMPLE2_EPS_CONST / |x|`.
pub const EXAMPLE2_EPS_CONST: f64 = 5.0;
pub const EXAMPLE2_EPS_POINTS: [f64; 8] = [-50.0, -20.0, -10.0, -5.0, 5.0, 10.0, 20.0, 50.0];

pub const THM33_WINDOW: f64 = 20.0;
pub const THM33_N: usize = 201;
pub const THM33_N_FINE: usize = 401;
/// Ceiling on `c(J/d)`, `c(I/d)`, `c(S/d)` for Example 2.
pub const THM33_C_ANCHOR: f64 = 20.0;
/// Largest relative change of those constants when the grid doubles.
pub const THM33_C_DRIFT: f64 = 0.02;

pub const EXAMPLE1_ALPHA: f64 = 0.3;
pub const EXAMPLE1_BETA: f64 = 0.4;
pub const EXAMPLE1_WINDOW: f64 = 100.0;
pub const EXAMPLE1_N: usize = 201;
/// `d(x)/(1+x²)^α ∈ [1/c, c]`.
pub const EXAMPLE1_C_ANCHOR: f64 = 10.0;

pub const KCLASS_X0: f64 = 10.0;
pub const KCLASS_POINTS: [f64; 6] = [-50.0, -20.0, -10.0, 10.0, 20.0, 50.0];
pub const KCLASS_SLACK: f64 = 1e-6;
pub const GAMMA_SAMPLE_SAMPLES: usize = 10_000;
pub const GAMMA_SAMPLE_SEED: u64 = 2718;

pub const COVER_CELLS: usize = 50;
pub const CELL_MASS_TOL: f64 = 1e-6;

pub const GREEN_RESIDUAL_MAX: f64 = 1e-3;
pub const GREEN_FD_STEP: f64 = 1e-4;
/// Accepted band for the residual ratio under `h → h/2`.
pub const GREEN_RATE_BAND: (f64, f64) = (3.0, 5.0);
pub const GREEN_CLOSED_FORM_TOL: f64 = 1e-8;

pub const ADMISSIBLE_WINDOWS: (f64, f64) = (20.0, 40.0);
pub const ADMISSIBLE_DRIFT: f64 = 0.05;
pub const DIVERGENCE_WINDOWS: [f64; 3] = [3.0, 5.0, 8.0];

pub const EXAMPLE2_F1_WINDOW: f64 = 10.0;
pub const EXAMPLE2_F1_N: usize = 101;
/// `F₁(x)(x² + 1)/cosh(x cos x) ∈ [1/c, c]`.
pub const EXAMPLE2_F1_ANCHOR: f64 = 25.0;
