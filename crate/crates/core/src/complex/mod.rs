//! Geometric triangulations of closed projectively flat manifolds, the
//! polyhedral Gauss–Bonnet terms `S(σ)`, `d(ν)`, `k(σ^n)`, the induced
//! measure `μ(M)`, and the checks `χ(M) = μ(M)` and the developing-image
//! dichotomy.
//!
//! A triangulation is a [`DeltaComplex`] together with one developed
//! [`SphericalSimplex`](crate::geom::SphericalSimplex) per top simplex, whose
//! vertex order follows the simplex's vertex tuple. Hyperbolic examples are
//! absent on purpose: their holonomy admits no invariant probability measure.

mod builtin;
mod delta;
mod dichotomy;
mod doc;
mod gauss_bonnet;
mod triangulation;

pub use builtin::{builtin_document, klein_grid, rp2_icosahedral, s1_polygon, s2_octahedron, t2_grid, BUILTIN_NAMES};
pub use delta::DeltaComplex;
pub use dichotomy::{dichotomy_check, holonomy_words, AtomCoverage, DichotomyReport, DichotomyStatus};
pub use doc::{ManifoldDoc, PairingDoc};
pub use gauss_bonnet::{
    angle_table, gauss_bonnet_terms, gb_report, transversality_check, AngleTable, FaceValue,
    GbReport, GbTerms, Scalar, TransversalityReport, TransversalityViolation, Verdict,
};
pub use triangulation::{GeometricTriangulation, Pairing};

use crate::geom::GeomError;
use crate::measure::MeasureError;
use serde::Serialize;
use thiserror::Error;

/// A pairing whose map does not carry one developed facet onto the other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingMismatch {
    pub pairing: usize,
    pub face: usize,
    pub simplex_a: usize,
    pub simplex_b: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("not a closed manifold: (n-1)-faces with incidence counts other than 2: {faces:?}")]
    NotAManifold { faces: Vec<(usize, usize)> },
    #[error("developing mismatch: {mismatches:?}")]
    DevelopingMismatch { mismatches: Vec<PairingMismatch> },
    #[error("developed simplex {simplex}: {source}")]
    DegenerateSimplex { simplex: usize, source: GeomError },
    #[error(
        "top simplex {simplex}: an atom at {atom:?} lies on a developed boundary hyperplane{}",
        .facet.map(|f| format!(" (facet {f})")).unwrap_or_default()
    )]
    BoundaryAtom {
        simplex: usize,
        facet: Option<usize>,
        atom: Vec<f64>,
        normal: Vec<f64>,
    },
    #[error("measure is on S^{measure} but the manifold has dimension {manifold}")]
    DimensionMismatch { manifold: usize, measure: usize },
    #[error("invariant set is not invariant under holonomy generator {generator}")]
    NotInvariant { generator: usize },
    #[error("inconsistent dichotomy: chi = {chi}, {detail}; check the measure's holonomy invariance")]
    InconsistentDichotomy { chi: i64, detail: String },
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
