//! Exact symbolic computation for the K-theoretic Peterson map between the
//! equivariant quantum K-ring of the SL_n flag variety and the equivariant
//! K-homology of the affine Grassmannian, together with mechanical
//! verification of the identities relating the two sides (tau-function
//! determinants, k-rectangle factorization, Toda conserved quantities,
//! quantum Grothendieck recursions) at desk scale.
//!
//! All arithmetic is exact: integer-coefficient Laurent polynomials in the
//! equivariant parameters, their fractions, and degree-truncated symmetric
//! series over those fractions. No floating point anywhere.

pub mod error;
pub mod ring;
pub mod rt;
pub mod sym;
pub mod affine;
pub mod demazure;
pub mod groth;
pub mod toda;
pub mod peterson;
pub mod cache;
pub mod config;
pub mod report;

pub use error::KError;
