//! Exact tropical geometry of space curves.
//!
//! Starting from purely tropical data — the monomial supports and
//! rational coefficient valuations of `n−1` hypersurfaces cutting out a
//! curve in projective `n`-space — this crate computes:
//!
//! * the tropical curve as a weighted polyhedral complex,
//! * the tropical tangent lines (families of tropical Plücker vectors)
//!   at every point of the curve,
//! * the tropicalized Gauss image,
//! * the tropical dual variety and tropical tangential variety with
//!   multiplicities, and
//! * the Newton polytope and degree of the dual hypersurface, recovered
//!   from the weighted tropical dual.
//!
//! All arithmetic is exact (arbitrary-precision rationals); there is no
//! floating point anywhere in the library.

pub mod error;
pub mod rat;
pub mod lattice;
pub mod linalg;
pub mod hypersurface;
pub mod curve;
pub mod cell;
pub mod tangent;
pub mod poly;
pub mod complexes;
pub mod fastpath;
pub mod newton;
pub mod io;

#[cfg(test)]
mod props;

pub use error::Error;
