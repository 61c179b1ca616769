//! Ownership-based wealth distributions.
//!
//! Wealth objects are either *distinguishable* (coins, banknotes) or
//! *identical* (deposits, cryptocurrency value). Randomly allocating them
//! over distinguishable owners gives Λ-truncated Poisson laws for the first
//! class and Λ-truncated geometric (Gentile) laws for the second.
//!
//! - [`dist`]: the truncated and atomic probability mass functions.
//! - [`solver`]: Lagrange multipliers from the conservation constraints.
//! - [`convolve`]: weighted convolutions, generating functions, many-bank laws.
//! - [`inequality`]: Lorenz curves, Gini coefficients, entropies, tail masses.
//! - [`bitcoin`]: the UTXO ladder model and integer partitions.
//! - [`mc`]: Monte Carlo allocation samplers and exact Ω enumeration.

pub mod bitcoin;
pub mod convolve;
pub mod dist;
pub mod error;
pub mod inequality;
pub mod mc;
pub mod roots;
pub mod solver;
mod special;

pub use convolve::{SignedPmf, ValuePmf};
pub use dist::{AtomicKind, Cutoff, GentileParams, Pmf, SpeciesClass, SpeciesSpec};
pub use error::{Error, Result};
pub use inequality::LorenzCurve;
pub use mc::{AllocationSample, RngStream};
pub use solver::{Multipliers, WealthSystem};

/// Default bound on the probability mass dropped when an infinite support is cut.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
