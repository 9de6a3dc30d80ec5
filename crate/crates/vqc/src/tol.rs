//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by a public check lives here so that tests and
//! library code agree on the same numbers.

/// Hermiticity check `‖H − H†‖_F` for inputs to [`crate::qmat::herm_expm`] and observables.
pub const HERMITIAN: f64 = 1e-10;

/// Allowed deviation of `‖ψ‖` from one for [`crate::qmat::expectation`].
pub const STATE_NORM: f64 = 1e-10;

/// Largest imaginary part tolerated in `ψ†Oψ` for Hermitian `O`.
pub const EXPECTATION_IMAG: f64 = 1e-12;

/// Relative off-diagonal threshold that ends a Jacobi sweep.
pub const JACOBI_OFFDIAG: f64 = 1e-14;

/// Sweep cap for the one-sided Jacobi SVD and the Hermitian Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Unitarity accepted by the UMAT loader and by VCR targets.
pub const UNITARY_LOAD: f64 = 1e-8;

/// Curvature guard: BFGS skips the update when `sᵀy` is at or below this.
pub const BFGS_CURVATURE: f64 = 1e-12;

/// Relative residual accepted for the kernel ridge dual solve.
pub const RIDGE_RESIDUAL: f64 = 1e-8;
