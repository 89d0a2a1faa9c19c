//! Numeric tolerances used across the crate.
//!
//! Every threshold that a public operation checks against lives here so that
//! tests and callers refer to the same named value.

/// Max-entry deviation from Hermiticity accepted by eigensolvers and expectations.
pub const HERMITIAN: f64 = 1e-10;

/// Cyclic Jacobi terminates once every off-diagonal entry is below this magnitude.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;

/// Sweep cap for cyclic Jacobi. Dimension 8 converges in well under 20.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Allowed deviation of a state vector's norm from 1.
pub const STATE_NORM: f64 = 1e-12;

/// Allowed deviation of a direction's Cartesian norm from 1.
pub const UNIT_NORM: f64 = 1e-12;

/// Largest imaginary part tolerated in the raw form of `<psi|A|psi>`.
pub const EXPECTATION_IMAGINARY: f64 = 1e-10;

/// Max-entry commutator norm under which two operators count as commuting.
pub const COMMUTATOR: f64 = 1e-10;

/// Reconstruction error bound for a Hermitian eigensystem.
pub const EIGEN_RECONSTRUCTION: f64 = 1e-9;

/// Pairwise orthonormality bound for eigenvectors.
pub const EIGEN_ORTHONORMAL: f64 = 1e-10;

/// Deviation of an operator's square from the identity for a +-1 observable.
pub const INVOLUTION: f64 = 1e-9;

/// Allowed deviation of an atom distribution's total weight from 1.
pub const DISTRIBUTION_SUM: f64 = 1e-12;

/// Born probabilities below this magnitude are rounding noise and are zeroed.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Slack used when checking measure inequalities in floating point.
pub const MEASURE_ARITHMETIC: f64 = 1e-12;
