//! Tolerances shared by the monitors and the verification suites.
//!
//! The extrema allowance is `tau = EXTREMA_C1 * dt + EXTREMA_C2 * dx^3`. On the
//! regression scenarios (flat, sine, off-center bump, invasion; half-plane and
//! strip; n in {256, 512, 1024}; T = 0.2) the measured monotonicity excess was
//! exactly zero in every run, so the constants only need to absorb roundoff
//! and stay far below any physical change of the extrema per record.

/// Per-unit-`dt` allowance in the extrema monotonicity checks.
pub const EXTREMA_C1: f64 = 1e-6;
/// Per-unit-`dx^3` allowance in the extrema monotonicity checks.
pub const EXTREMA_C2: f64 = 1e-4;
/// Upper edge `K` of the lifted contact band `[eps/2, K eps]`.
pub const CONTACT_BAND_K: f64 = 3.0;
/// Allowed excess of the pointwise inequality ratios over 1.
pub const RATIO_SLACK: f64 = 1e-6;
/// Analytic-path identity residual bound.
pub const IDENTITY_ANALYTIC: f64 = 1e-8;
/// Finite-difference-path identity residual bound.
pub const IDENTITY_FD: f64 = 1e-5;
/// Arctan primitive residual bound.
pub const ARCTAN_RESIDUAL: f64 = 1e-6;
/// Lattice-sum error bound at `N = 10^4`.
pub const THETA_ERROR: f64 = 1e-4;
/// Accepted band for the fitted lattice tail exponent.
pub const THETA_EXPONENT: (f64, f64) = (0.9, 1.1);

/// `tau` for a run with the given largest step and spacing.
pub fn extrema_tolerance(dt: f64, dx: f64) -> f64 {
    EXTREMA_C1 * dt + EXTREMA_C2 * dx.powi(3)
}
