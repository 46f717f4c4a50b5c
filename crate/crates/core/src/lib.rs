//! Numerical laboratory for the joint multiplicative behaviour of `n` and
//! `floor(alpha * n)`.
//!
//! The crate is organized around a few load-bearing guarantees:
//!
//! * every `floor(alpha n)` is exact (surd comparisons or certified decimal
//!   intervals; see [`alpha`]);
//! * arithmetic functions come from a segmented sieve with an independent
//!   trial-division route kept for cross-checks (see [`sieve`]);
//! * long averages use compensated summation and a fixed block partition, so
//!   results are bit-identical across runs and thread counts (see [`sum`]).
//!
//! On top of that sit the statistical layers: averaging operators and
//! inequality reports ([`averages`]), empirical distributions
//! ([`distributions`]), correlation estimators ([`correlations`]), and
//! trigonometric-polynomial approximation of Beatty indicator sets
//! ([`almost_periodic`]).

pub mod alpha;
pub mod averages;
pub mod correlations;
pub mod distributions;
pub mod error;
pub mod almost_periodic;
pub mod phase;
pub mod sieve;
pub mod sum;

pub use alpha::AlphaExact;
pub use error::{Error, Result};
