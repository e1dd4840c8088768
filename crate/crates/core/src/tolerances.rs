//! Numerical thresholds shared across modules.

/// Relative asymmetry allowed before an input is rejected as non-Hermitian.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Relative asymmetry allowed when constructing a [`crate::linalg::PsdMatrix`].
pub const PSD_HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in `[-1e-12 · max(λ_max, 1), 0)` are clamped to zero.
pub const CLAMP_RELATIVE: f64 = 1e-12;

/// Default verdict tolerance on relative slack.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-8;

/// Tightened tolerance used to confirm hunter violations.
pub const CONFIRM_TOL: f64 = 1e-10;

/// Relative slack allowed when checking operator-order preconditions such as `A ≥ |B|`.
pub const PRECONDITION_TOL: f64 = 1e-9;
