//! The Luce model on permutations and its relatives.
//!
//! * [`luce`]: the pmf of sequential weighted sampling without replacement,
//!   the urn and exponential-race samplers, and spacings of exponentials.
//! * [`topk`]: the measure on the first `k` draws against i.i.d. sampling
//!   (d∞ and total variation).
//! * [`bottomk`]: the last `k` draws, the convergence criterion for infinite
//!   weight sequences and the limiting mass functions.
//! * [`arrangements`]: chamber walks on the Boolean and braid arrangements,
//!   exact stationary distributions and the urn sampler for them.
//!
//! Labels are 1-based throughout. Monte Carlo and sweep helpers take an
//! [`Execution`] and run on rayon when the `parallel` feature is enabled.

pub mod arrangements;
pub mod bottomk;
pub mod error;
pub mod io;
pub mod luce;
pub mod par;
pub mod perm;
pub mod quad;
pub mod rng;
pub mod topk;
pub mod weights;

pub use error::{Error, Result};
pub use luce::{luce_pmf, sample_exponential, sample_spacings, sample_urn, Sampler};
pub use par::Execution;
pub use perm::Permutation;
pub use rng::RngStream;
pub use weights::{Orientation, WeightVector};
