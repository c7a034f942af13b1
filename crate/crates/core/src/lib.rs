//! Exact computation in differential polynomial rings `R[x;delta]` over
//! finite coefficient rings.
//!
//! The crate provides:
//!
//! - finite unital rings given by explicit operation tables, their ideals,
//!   quotients and radicals ([`ring`]);
//! - validated derivations, induced derivations on quotients, and the
//!   delta-core computation ([`derivation`]);
//! - skew polynomial arithmetic for `R[x;delta]`, the coefficient projection
//!   onto `(R/I)[x]`, and polynomial machinery over finite field quotients
//!   ([`ore`]);
//! - the quasi-duo decision procedure, maximal-ideal enumeration with
//!   decidable membership, and radical reports ([`analyzer`]);
//! - differential polynomial rings in several non-commuting indeterminates
//!   with corner decompositions ([`multivar`]);
//! - a per-instance invariant suite ([`verify`]).
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs, so everything can be called concurrently. With the
//! `parallel` feature (enabled by default) the exhaustive scan kernels in
//! [`kernels`] run on rayon; without it they fall back to sequential loops
//! with identical results.

pub mod analyzer;
pub mod derivation;
mod error;
pub mod kernels;
pub mod multivar;
pub mod ore;
pub mod ring;
pub mod verify;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Size caps that keep every operation at desk scale. All caps are explicit
/// and overridable; operations report which cap they hit.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Largest constructible ring order.
    pub order_cap: usize,
    /// Largest ring order for one-sided ideal enumeration.
    pub onesided_enum_cap: usize,
    /// Largest ring order for two-sided ideal enumeration.
    pub twosided_enum_cap: usize,
    /// Largest degree for polynomial enumeration.
    pub degree_cap: usize,
    /// Largest word length for the corner closure probe.
    pub corner_degree_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            order_cap: 4096,
            onesided_enum_cap: 256,
            twosided_enum_cap: 4096,
            degree_cap: 6,
            corner_degree_cap: 4,
        }
    }
}

impl Limits {
    /// Default limits with a different order cap (the CLI override).
    pub fn with_order_cap(order_cap: usize) -> Self {
        Limits { order_cap, ..Limits::default() }
    }
}
