//! Exact computation in free vector lattices and the dense sublattice of
//! free Banach lattices.
//!
//! Elements are lattice-linear expressions ([`expr`]) realized as
//! positively homogeneous piecewise-linear functions ([`pwl`]). Two
//! expressions are the same element exactly when they agree as functions,
//! which [`pwl::equivalent`] decides. The free Banach lattice norm is
//! computed as a certified lower/upper sandwich in [`norm`], and
//! [`lattice`] provides generator embeddings and the lattice homomorphisms
//! induced by maps on generators.

pub mod expr;
pub mod lattice;
pub mod linalg;
pub mod norm;
pub mod pwl;
pub mod random;
pub mod rational;

pub use expr::{parse, print, Expr, ExprError};
pub use pwl::{equivalent, Equivalence, LinFunc, PwlError, PwlFunction};
pub use norm::{norm_certificate, NormCertificate, NormError, NormOptions, SpaceSpec};
pub use rational::{Rational, RealValue};
