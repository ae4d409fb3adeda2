//! Exact computation with truncated p-typical Witt vectors, frames, displays,
//! banal (G,mu)-displays, their crystals, and universal deformation rings over
//! finite p-nilpotent base rings.
//!
//! All arithmetic is exact. p-adic precision is tracked explicitly: Witt
//! vectors carry their truncation length, semilinear maps that consume
//! precision shorten it, and matrices in isogeny contexts are stored as an
//! integral part together with a p-denominator exponent. Operations that would
//! need more precision than is available return [`Error::Precision`] instead
//! of silently truncating.

pub mod error;
pub mod linalg;
pub mod rings;
pub mod frames;
pub mod displays;
pub mod gdisplay;
pub mod crystal;
pub mod deform;
pub mod report;
pub mod selftest;

pub use error::{Error, Result};
pub use rings::{BaseRing, RingElement, Witt};
