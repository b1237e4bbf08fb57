//! Exact-arithmetic tools for rod complements in the 3-torus.
//!
//! A *rod* is a straight closed geodesic in T^3 = R^3/Z^3, recorded by a
//! primitive integer direction vector up to sign.  This crate classifies the
//! geometry of rod complements in the decidable regimes, rewrites rods as
//! nested annular Dehn fillings of standard parent manifolds, and computes
//! upper and lower bounds on hyperbolic volume.  All combinatorial data is
//! kept in arbitrary-precision integers; only the final volume figures pass
//! through floating point.

pub mod contfrac;
pub mod dehnfill;
pub mod error;
pub mod intlinalg;
pub mod rodmodel;
pub mod volbounds;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
