//! Otelbaev averages and Green-operator kernels for the first-order equation
//!
//! ```text
//!     -y'(x) + q(x) y(x) = f(x),   x ∈ ℝ,   q ≥ 0.
//! ```
//!
//! The crate computes the averaging half-width `d(x)` (the smallest `d` with
//! `∫_{x-d}^{x+d} q = 2`) and its reciprocal `q*(x)`, builds half-axis
//! coverings by intervals `[xₙ - κ(xₙ), xₙ + κ(xₙ)]`, evaluates the kernel
//! integrals `I`, `J`, `S`, applies the Green operator and measures weighted
//! `L_{p,θ}` norms. On top of these sit diagnostics that check, on finite
//! grids, the two-sided estimates `J ≍ I ≍ S ≍ d` and the admissibility of
//! the pair `{L_{p,θ}; L_p}` with `θ ≍ q*`.
//!
//! Module map:
//!
//! * [`quadrature`]: adaptive Gauss–Kronrod and truncated `∫ e^{-E}` tails.
//! * [`coefficient`]: coefficients, decompositions, the catalog, unimodal pairs.
//! * [`average`]: `d(x)`, `q*(x)`, Steklov averages, `q₀(a)`, `d₀`, solvability.
//! * [`covering`]: `R(x, κ)` coverings of half-axes.
//! * [`kclass`]: `κ₁`, `κ₂`, `γ(a, b)` and class `K(γ)` diagnostics.
//! * [`kernel`]: `I`, `J`, `S`, `M`, the Green operator, weighted norms.
//! * [`equivalence`]: weak-equivalence constants and verification suites.
//! * [`suite`]: the acceptance battery, anchored by [`expectations`].
//! * [`cli`]: the `otelbaev` command-line driver.
//!
//! ```
//! use otelbaev::{average::d_of_x, coefficient::catalog};
//!
//! let q = catalog::square();
//! let d = d_of_x(&q, 0.0, 1e-12).unwrap();
//! assert!((d.d - 3f64.cbrt()).abs() < 1e-10);
//! ```

pub mod average;
pub mod cli;
pub mod coefficient;
pub mod covering;
pub mod equivalence;
pub mod error;
pub mod expectations;
pub mod grid;
pub mod kclass;
pub mod kernel;
pub mod quadrature;
pub mod suite;

pub use coefficient::{catalog, CoefficientFunction, UnimodalPair};
pub use error::{Error, Result};
pub use quadrature::{Direction, QuadratureConfig};
