//! Measure-theoretic angles of spherical simplices and Gauss–Bonnet
//! identities for projective manifolds carrying invariant measures.

pub mod complex;
pub mod geom;
pub mod measure;
pub mod pullback;
pub mod simplex;
pub mod symmetry;
