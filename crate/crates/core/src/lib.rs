//! Computational toolkit for correlations of bounded multiplicative functions.
//!
//! The crate measures the objects that standard analytic-number-theory
//! arguments about averaged correlations manipulate: segmented sieves for
//! `lambda`/`mu` ([`sieve`]), typical-factorization interval ladders
//! ([`typical`]), Dirichlet characters and the pretentious distance
//! ([`dirichlet`]), correlation sums and short-interval variance
//! ([`correlations`]), short exponential sums with major/minor arc
//! classification ([`expsum`]), and an iterative multiplicative-function
//! construction whose consecutive correlations stay large while its distance
//! to every character twist diverges ([`counterexample`]).
//!
//! All quantities are computed exactly or with explicit, documented
//! accumulation tolerances; nothing here proves an asymptotic bound — the
//! crate exists to evaluate identities exactly and to record measured trends.

pub mod correlations;
pub mod counterexample;
pub mod dirichlet;
pub mod error;
pub mod expsum;
pub mod sieve;
pub mod typical;
pub mod util;

pub use error::{Error, Result};
