//! Antipodally invariant measures on `S^n` with total mass 2, i.e. lifts of
//! probability measures on `RP^n`, and their evaluation on [`Region`]s.
//!
//! Six kinds are supported behind [`MeasureSpec`]:
//!
//! | kind | evaluation |
//! |------|------------|
//! | [`RoundMeasure`] | exact for `n ≤ 2` (arc length / spherical excess) and for regions with at most two half-spaces; Monte Carlo otherwise |
//! | [`AtomicMeasure`] | exact, rational weights |
//! | [`SubsphereUniform`] | reduced to a round measure on the subsphere |
//! | [`Mixture`] | convex combination |
//! | [`RestrictedNormalized`] | `λ|_A / λ(A)` for a region `A` (read projectively) |
//! | [`FiniteOrbitMeasure`] | equal weights on a finite invariant set |
//!
//! Only countably additive measures have a representation here. Finitely
//! additive invariant means (which may vanish on every compact set) have no
//! finite description and are not modelled.

mod atomic;
mod composite;
mod doc;
mod invariance;
pub mod monte_carlo;
mod round;

pub use atomic::{average_over_group, finite_orbit_measure, verify_group, Atom, AtomicMeasure, FiniteOrbitMeasure};
pub use composite::{restrict_to_subspace, Mixture, RestrictedNormalized};
pub use doc::{AtomDoc, ComponentDoc, MeasureDoc, Weight};
pub use invariance::{check_invariance, random_region, InvarianceEntry, InvarianceReport, Tolerances};
pub use monte_carlo::McConfig;
pub use round::{RoundMeasure, SubsphereUniform};

use crate::geom::{GeomError, Hyperplane, Region};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// `|<normal, atom>|` at or below this puts the atom on the hyperplane.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("atom {atom:?} lies on the hyperplane with normal {normal:?}")]
    BoundaryAtom { atom: Vec<f64>, normal: Vec<f64> },
    #[error("support subsphere lies inside the hyperplane with normal {normal:?}")]
    BoundaryDegenerate { normal: Vec<f64> },
    #[error("dimension mismatch: measure lives on S^{expected}, got S^{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("averaging needs an atomic base measure")]
    NonAtomicBase,
    #[error("orbit exceeds {max_orbit} points")]
    OrbitOverflow { max_orbit: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("restriction domain has measure zero")]
    EmptyRestriction,
    #[error("subspace basis is degenerate")]
    DegenerateSubspace,
    #[error("Monte Carlo needs at least 2 samples, got {0}")]
    TooFewSamples(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("generator {generator}, region {region}: {source}")]
    AtRegion {
        generator: usize,
        region: usize,
        source: Box<MeasureError>,
    },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Value of a measure (or of a signed combination of measures) with its
/// statistical error. Exact evaluations carry `std_error = 0, samples = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
        }
    }

    /// Estimate of `total · P(hit)` from `hits` out of `samples` draws, with
    /// the sample standard deviation of the indicator.
    pub fn from_hits(hits: u64, samples: u64, total: f64) -> Self {
        let n = samples as f64;
        let p = hits as f64 / n;
        let var = p * (1.0 - p) * n / (n - 1.0);
        Self {
            value: total * p,
            std_error: total * (var / n).sqrt(),
            samples,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.samples == 0 && self.std_error == 0.0
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: c * self.value,
            std_error: c.abs() * self.std_error,
            samples: self.samples,
        }
    }

    /// `Σ cᵢ·Xᵢ` for independent estimates; errors add in quadrature.
    pub fn combine(terms: impl IntoIterator<Item = (f64, MeasureEstimate)>) -> Self {
        let mut value = 0.0;
        let mut var = 0.0;
        let mut samples = 0u64;
        for (c, e) in terms {
            value += c * e.value;
            var += c * c * e.std_error * e.std_error;
            samples = samples.saturating_add(e.samples);
        }
        Self {
            value,
            std_error: var.sqrt(),
            samples,
        }
    }

    /// Allowed deviation: `sigma_factor · σ` for estimates, `exact_tol` otherwise.
    pub fn allowance(&self, sigma_factor: f64, exact_tol: f64) -> f64 {
        if self.is_exact() {
            exact_tol
        } else {
            (sigma_factor * self.std_error).max(exact_tol)
        }
    }

    pub fn agrees_with(&self, target: f64, sigma_factor: f64, exact_tol: f64) -> bool {
        (self.value - target).abs() <= self.allowance(sigma_factor, exact_tol)
    }
}

/// Linear subspace `V` (orthonormal basis columns) whose projectivization
/// carries positive mass while no proper subspace of it does.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSubspace {
    pub basis: DMatrix<f64>,
}

impl SupportSubspace {
    /// Whether `[V]` lies inside the great hypersphere of `h`.
    pub fn inside(&self, h: &Hyperplane) -> bool {
        self.basis
            .column_iter()
            .all(|b| h.normal().dot(&b).abs() <= BOUNDARY_TOLERANCE)
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }
}

/// A measure on `S^n`: antipodally invariant, total mass 2.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Round(RoundMeasure),
    Atomic(AtomicMeasure),
    Subsphere(SubsphereUniform),
    Mixture(Mixture),
    Restricted(RestrictedNormalized),
    Orbit(FiniteOrbitMeasure),
}

impl MeasureSpec {
    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Round(m) => m.dim(),
            MeasureSpec::Atomic(m) => m.dim(),
            MeasureSpec::Subsphere(m) => m.dim(),
            MeasureSpec::Mixture(m) => m.dim(),
            MeasureSpec::Restricted(m) => m.dim(),
            MeasureSpec::Orbit(m) => m.atomic().dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MeasureSpec::Round(_) => "round",
            MeasureSpec::Atomic(_) => "atomic",
            MeasureSpec::Subsphere(_) => "subsphere",
            MeasureSpec::Mixture(_) => "mixture",
            MeasureSpec::Restricted(_) => "restricted",
            MeasureSpec::Orbit(_) => "orbit",
        }
    }

    pub(crate) fn check_region(&self, region: &Region) -> Result<(), MeasureError> {
        if region.ambient_dim() != self.dim() {
            return Err(MeasureError::DimensionMismatch {
                expected: self.dim(),
                found: region.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Measure of `region`.
    pub fn eval(&self, region: &Region, mc: &McConfig) -> Result<MeasureEstimate, MeasureError> {
        self.eval_union(std::slice::from_ref(region), mc)
    }

    /// Measure of the union of `regions`.
    pub fn eval_union(
        &self,
        regions: &[Region],
        mc: &McConfig,
    ) -> Result<MeasureEstimate, MeasureError> {
        for r in regions {
            self.check_region(r)?;
        }
        match self {
            MeasureSpec::Round(m) => m.eval_union(regions, mc),
            MeasureSpec::Atomic(m) => m.eval_union(regions),
            MeasureSpec::Subsphere(m) => m.eval_union(regions, mc),
            MeasureSpec::Mixture(m) => m.eval_union(regions, mc),
            MeasureSpec::Restricted(m) => m.eval_union(regions, mc),
            MeasureSpec::Orbit(m) => m.atomic().eval_union(regions),
        }
    }

    /// Minimal positive-measure subspaces. Empty for the round measure,
    /// which charges no proper subspace.
    pub fn support(&self) -> Vec<SupportSubspace> {
        match self {
            MeasureSpec::Round(_) => Vec::new(),
            MeasureSpec::Atomic(m) => m.support(),
            MeasureSpec::Subsphere(m) => vec![m.support()],
            MeasureSpec::Mixture(m) => m.support(),
            MeasureSpec::Restricted(m) => m.support(),
            MeasureSpec::Orbit(m) => m.atomic().support(),
        }
    }

    /// Whether the great hypersphere of `h` carries positive mass.
    pub fn charges_hyperplane(&self, h: &Hyperplane) -> bool {
        self.support().iter().any(|v| v.inside(h))
    }

    /// The atomic data of atomic and finite-orbit measures.
    pub fn as_atomic(&self) -> Option<&AtomicMeasure> {
        match self {
            MeasureSpec::Atomic(m) => Some(m),
            MeasureSpec::Orbit(m) => Some(m.atomic()),
            MeasureSpec::Restricted(m) => m.materialized(),
            _ => None,
        }
    }
}

impl From<RoundMeasure> for MeasureSpec {
    fn from(m: RoundMeasure) -> Self {
        MeasureSpec::Round(m)
    }
}

impl From<AtomicMeasure> for MeasureSpec {
    fn from(m: AtomicMeasure) -> Self {
        MeasureSpec::Atomic(m)
    }
}

impl From<SubsphereUniform> for MeasureSpec {
    fn from(m: SubsphereUniform) -> Self {
        MeasureSpec::Subsphere(m)
    }
}

impl From<Mixture> for MeasureSpec {
    fn from(m: Mixture) -> Self {
        MeasureSpec::Mixture(m)
    }
}

impl From<RestrictedNormalized> for MeasureSpec {
    fn from(m: RestrictedNormalized) -> Self {
        MeasureSpec::Restricted(m)
    }
}

impl From<FiniteOrbitMeasure> for MeasureSpec {
    fn from(m: FiniteOrbitMeasure) -> Self {
        MeasureSpec::Orbit(m)
    }
}

pub(crate) fn check_samples(mc: &McConfig) -> Result<(), MeasureError> {
    if mc.samples < 2 {
        return Err(MeasureError::TooFewSamples(mc.samples));
    }
    Ok(())
}
