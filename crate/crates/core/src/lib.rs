//! Distribution-valued solutions of the randomly reinforced urn functional
//! equation.
//!
//! The unknown of the equation maps an initial urn composition `(x, y)` to a
//! probability law on `[0, 1]`. This crate computes it two ways:
//!
//! * [`urn`] simulates the randomly reinforced urn and estimates the law of
//!   its limit proportion by Monte Carlo;
//! * [`solver`] iterates the one-step conditional expectation operator to its
//!   fixed point on a bounded, projectively transformed grid.
//!
//! Every law is a [`QuantileDist`]: a monotone vector of `K` quantiles at the
//! midpoint levels `(i + 1/2) / K`, for which the 1-Wasserstein distance is an
//! exact `O(K)` sum. [`closed_form`] holds the reference laws (Beta,
//! Kumaraswamy, scaled-Bernoulli urns) used to validate both routes.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and rayon for parallel sweeps and replicates; `serde` derives the
//! JSON representations.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod boundary;
pub mod closed_form;
pub mod dist;
mod error;
pub mod params;
pub mod rng;
pub mod solver;
pub mod special;
pub mod urn;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use boundary::BoundaryDatum;
pub use dist::{AtomReport, QuantileDist, Regrid};
pub use error::{Error, Result};
pub use params::ReinforcementPair;
pub use solver::{GridSpec, SolutionField, SolverConfig};
pub use urn::{RunConfig, UrnState};
