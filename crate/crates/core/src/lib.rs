//! Secrecy-rate maximization for an IRS-assisted downlink wiretap channel.
//!
//! The transmit beamformer and the IRS phase shifts are optimized alternately:
//! the beamformer in closed form as a generalized eigenvector, the phases by a
//! fractional-programming outer loop whose quadratic subproblems are solved by
//! conjugate gradient on the complex circle manifold.

pub mod ao;
pub mod baselines;
pub mod beamforming;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod fp;
pub mod linalg;
pub mod manifold;
pub mod metrics;
pub mod phase;
pub mod selftest;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
