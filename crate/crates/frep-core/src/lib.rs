//! Numerical laboratory for unitary representations of free groups.
//!
//! The crate is organized around five building blocks:
//!
//! * [`word`] — exact arithmetic for reduced words of the free group on
//!   `k >= 2` generators and the sparse group algebra over it.
//! * [`rep`] — finite-dimensional unitary representations as tuples of
//!   generator matrices: evaluation, tensor products, direct sums,
//!   identity extensions, Haar sampling, and a strong-operator metric
//!   surrogate.
//! * [`irred`] — irreducibility decisions via commutant computation,
//!   cross-checked by the dimension of the generated matrix algebra,
//!   plus cyclic-vector diagnostics.
//! * [`lambda`] — certified two-sided estimates of the regular
//!   representation norm via ball compressions on the Cayley graph.
//! * [`lab`] — transporter searches with operator-norm caps, the
//!   three-term transport chain and cyclicity chain verifiers, and
//!   Monte Carlo genericity experiments for tensor products.
//!
//! Everything is deterministic given explicit seeds: random streams are
//! ChaCha12, split per trial by [`seed::derive_seed`], and reductions run
//! in a fixed order.

pub mod algebra;
pub mod ball;
pub mod error;
pub mod irred;
pub mod lab;
pub mod lambda;
pub mod linalg;
pub mod rep;
pub mod seed;
pub mod word;

pub use algebra::GroupAlgebraElement;
pub use error::FrepError;
pub use irred::IrreducibilityReport;
pub use lambda::NormInterval;
pub use rep::{ProbeSequence, Representation};
pub use word::Word;

/// Complex scalar used throughout the matrix layer.
pub type C64 = num_complex::Complex<f64>;
