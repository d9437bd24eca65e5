//! Exact counting engine for the cubic Vinogradov mean value system.
//!
//! * [`signature`], [`multiset`]: power-sum signatures and weighted multiset enumeration.
//! * [`counting`]: `J_{s,k}(X)` and the congruence-restricted counts `I_m`.
//! * [`congruence`]: the auxiliary count `N(p; a, c)` and its lifting structure.
//! * [`lemmas`]: integer-cleared inequality checks and parameter sweeps.
//! * [`exponent`]: exact rational exponent recursion.
//! * [`cache`], [`context`]: persistent JSON-lines count cache and cache-through counting.

pub mod cache;
pub mod congruence;
pub mod context;
pub mod counting;
pub mod error;
pub mod exponent;
pub mod lemmas;
pub mod multiset;
pub mod primes;
pub mod signature;

pub use error::{Error, Result};

/// Version string recorded in cache entries.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
