//! Numerical laboratory for value assignments on dense sets of measurement
//! alignments in the three-particle GHZ setting.
//!
//! * [`linalg`]: small dense complex matrices, tensor products, Hermitian eigensystems.
//! * [`ghz`]: the GHZ state, spin observables, correlations and their deviations.
//! * [`hvm`]: valuations of the six near-x/near-y observables, parity and the max-min program.
//! * [`mkc`]: rational directions, triplet-set structure, non-local commuting triplets.
//! * [`harness`]: Monte Carlo experiments and the end-to-end reports.

pub mod error;
pub mod ghz;
pub mod harness;
pub mod hvm;
pub mod linalg;
pub mod mkc;
pub mod seeding;
pub mod tolerance;

pub use error::{Error, Result};
pub use ghz::{AlignmentSextet, Axis, Combo, DetectorTriplet, Direction, EpsilonReport};
pub use harness::{ExperimentConfig, ExperimentSummary, ModelKind, RoundRecord};
pub use hvm::{AtomDistribution, Valuation, Verdict, VerdictKind};
pub use linalg::{ComplexScalar, OperatorMatrix, StateVector};
pub use mkc::{RationalDirection, TripletSet};
