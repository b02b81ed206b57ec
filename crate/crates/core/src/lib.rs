//! Makespan minimization on machines arranged in a rooted tree, where a job
//! may only run on the machines between its home node and the root.
//!
//! The solver rounds large jobs onto a geometric grid, describes job sets by
//! configuration tuples, runs a leaf-to-root dynamic program over those
//! tuples for a guessed makespan `C`, and wraps that relaxed decision in a
//! bisection over `C`. Every returned schedule has makespan at most
//! `(1 + 4ε)` times the optimum.
//!
//! All grid arithmetic is exact. The numeric core is generic over
//! [`ExactScalar`]; [`Rational`] (arbitrary precision) is the default used by
//! the CLI, and the fixed-width aliases are available when ε is coarse
//! enough that the grid cannot overflow.

pub mod cli;
pub mod dp;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod reconstruct;
pub mod rounding;
pub mod scalar;
pub mod search;

pub use dp::{ConfigAssignment, Decision, DpOptions, NodeState, Witness};
pub use error::{Error, InstanceError};
pub use instance::{Instance, Job, Machine, Schedule, ScheduleMeta, TreeShape};
pub use oracle::OracleResult;
pub use rounding::{ConfigTuple, Epsilon, SizeClass, SizeGrid};
pub use scalar::ExactScalar;
pub use search::{CertificateReport, SolveResult};

/// Arbitrary-precision rational, safe for every ε.
pub type Rational = num_rational::BigRational;
/// 64-bit rational; overflows quickly for fine ε.
pub type Rational64 = num_rational::Ratio<i64>;
/// 128-bit rational.
pub type Rational128 = num_rational::Ratio<i128>;

pub type Grid = SizeGrid<Rational>;
pub type Grid64 = SizeGrid<Rational64>;
pub type Grid128 = SizeGrid<Rational128>;

pub type Solution = SolveResult<Rational>;
