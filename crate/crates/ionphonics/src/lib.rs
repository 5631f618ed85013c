//! Gaussian dynamics of the radial modes of a trapped-ion chain.
//!
//! The crate models each ion's transverse oscillation as one bosonic mode,
//! propagates Gaussian states under piecewise-constant trapping-frequency
//! schedules (closed or with a thermal bath), quantifies entanglement and
//! displaced-parity nonlocality, and compiles arbitrary linear (symplectic)
//! operations into frequency-switch schedules that it verifies against the
//! exact coupled dynamics.

pub mod bell;
pub mod chain;
pub mod compiler;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod scenario;
pub mod transfer;
pub mod units;

pub use chain::{ChainConfig, ChainModel};
pub use compiler::{compile, verify_schedule, CompileOptions, LadderPlan, Schedule, TargetOp};
pub use error::{Error, Result};
pub use gaussian::{GaussianState, NoiseModel, SymplecticMatrix};
