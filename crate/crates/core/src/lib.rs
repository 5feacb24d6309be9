//! Stable linear embeddings of low-dimensional model sets.
//!
//! The crate is organised around four activities:
//!
//! - [`model_sets`]: sampling model sets (sparse vectors, low-rank matrices,
//!   Haar-sparse signals, the correlated sequence), normalized secants,
//!   greedy epsilon-nets and box-counting dimension estimates.
//! - [`embeddings`]: two-stage maps (a projection onto a finite subspace
//!   followed by a random matrix) and rank-one projection maps.
//! - [`rip_estimator`] and [`tail_probes`]: empirical restricted-isometry
//!   constants, mu-norms, and concentration-shape checks.
//! - [`bounds`] and [`haar_fourier`]: closed-form sample-complexity bounds,
//!   chaining sums, moment constants and the Haar/Fourier balancing residual.
//!
//! [`experiment`] wires everything into reproducible, seed-driven runs used by
//! the `stable-embed` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod embeddings;
pub mod error;
pub mod experiment;
pub mod haar_fourier;
pub mod io;
pub mod model_sets;
pub mod rip_estimator;
pub mod rng;
pub mod stats;
pub mod tail_probes;
pub mod vector;

pub use error::{Error, Result};
pub use vector::Vector;
