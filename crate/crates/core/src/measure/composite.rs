use super::atomic::rational_to_f64;
use super::{
    AtomicMeasure, McConfig, MeasureError, MeasureEstimate, MeasureSpec, SubsphereUniform,
    SupportSubspace,
};
use crate::geom::Region;
use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const SUBSPACE_TOLERANCE: f64 = 1e-9;

/// Convex combination `Σ cᵢ λᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    dim: usize,
    components: Vec<(f64, MeasureSpec)>,
}

impl Mixture {
    pub fn new(components: Vec<(f64, MeasureSpec)>) -> Result<Self, MeasureError> {
        let Some((_, first)) = components.first() else {
            return Err(MeasureError::InvalidWeights("empty mixture".into()));
        };
        let dim = first.dim();
        let mut total = 0.0;
        for (c, m) in &components {
            if !c.is_finite() || *c < 0.0 {
                return Err(MeasureError::InvalidWeights(format!("coefficient {c}")));
            }
            if m.dim() != dim {
                return Err(MeasureError::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            total += c;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MeasureError::InvalidWeights(format!(
                "coefficients sum to {total}"
            )));
        }
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[(f64, MeasureSpec)] {
        &self.components
    }

    pub(crate) fn eval_union(
        &self,
        regions: &[Region],
        mc: &McConfig,
    ) -> Result<MeasureEstimate, MeasureError> {
        let mut terms = Vec::with_capacity(self.components.len());
        for (i, (c, m)) in self.components.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            terms.push((*c, m.eval_union(regions, &mc.derive(i as u64))?));
        }
        Ok(MeasureEstimate::combine(terms))
    }

    pub fn support(&self) -> Vec<SupportSubspace> {
        self.components
            .iter()
            .filter(|(c, _)| *c > 0.0)
            .flat_map(|(_, m)| m.support())
            .collect()
    }
}

/// `λ|_{±A} / λ(A)`: the base measure conditioned on the projective image of
/// the region `A`, rescaled to total mass 2.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedNormalized {
    base: Box<MeasureSpec>,
    domain: Region,
    materialized: Option<AtomicMeasure>,
}

impl RestrictedNormalized {
    pub fn new(base: MeasureSpec, domain: Region) -> Result<Self, MeasureError> {
        base.check_region(&domain)?;
        let materialized = match base.as_atomic() {
            Some(a) => Some(restrict_atomic(a, &domain)?),
            None => None,
        };
        Ok(Self {
            base: Box::new(base),
            domain,
            materialized,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &MeasureSpec {
        &self.base
    }

    pub fn domain(&self) -> &Region {
        &self.domain
    }

    /// The explicit atomic form when the base is atomic.
    pub fn materialized(&self) -> Option<&AtomicMeasure> {
        self.materialized.as_ref()
    }

    pub(crate) fn eval_union(
        &self,
        regions: &[Region],
        mc: &McConfig,
    ) -> Result<MeasureEstimate, MeasureError> {
        if let Some(a) = &self.materialized {
            return a.eval_union(regions);
        }
        if self.domain.is_whole() {
            return self.base.eval_union(regions, mc);
        }
        let denom = self.base.eval(&self.domain, &mc.derive(0))?;
        if denom.value <= 0.0 {
            return Err(MeasureError::EmptyRestriction);
        }
        // A and -A are disjoint, so the two pieces add.
        let mut pieces = Vec::with_capacity(2 * regions.len());
        for r in regions {
            pieces.push(r.intersect(&self.domain)?);
        }
        let anti = self.domain.antipodal();
        let mut anti_pieces = Vec::with_capacity(regions.len());
        for r in regions {
            anti_pieces.push(r.intersect(&anti)?);
        }
        let near = self.base.eval_union(&pieces, &mc.derive(1))?;
        let far = self.base.eval_union(&anti_pieces, &mc.derive(2))?;
        let num = MeasureEstimate::combine([(1.0, near), (1.0, far)]);
        let value = num.value / denom.value;
        let rel_var = (num.std_error / denom.value).powi(2)
            + (num.value * denom.std_error / (denom.value * denom.value)).powi(2);
        Ok(MeasureEstimate {
            value,
            std_error: rel_var.sqrt(),
            samples: num.samples.saturating_add(denom.samples),
        })
    }

    pub fn support(&self) -> Vec<SupportSubspace> {
        match &self.materialized {
            Some(a) => a.support(),
            None => self.base.support(),
        }
    }
}

fn restrict_atomic(a: &AtomicMeasure, domain: &Region) -> Result<AtomicMeasure, MeasureError> {
    let whole = [domain.clone(), domain.antipodal()];
    let mut kept = Vec::new();
    for atom in a.atoms() {
        let single = AtomicMeasure::dirac(atom.point.clone());
        if !single.mass(&whole)?.is_zero() {
            kept.push((atom.point.clone(), atom.weight.clone()));
        }
    }
    if kept.is_empty() {
        return Err(MeasureError::EmptyRestriction);
    }
    AtomicMeasure::new(kept)
}

fn orthonormal_basis(dim: usize, spanning: &[Vec<f64>]) -> Result<DMatrix<f64>, MeasureError> {
    Ok(SubsphereUniform::new(dim, spanning)?.basis().clone())
}

fn distance_to_span(basis: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let proj = basis * (basis.transpose() * x);
    (x - proj).norm()
}

fn contains_subspace(outer: &DMatrix<f64>, inner: &DMatrix<f64>) -> bool {
    inner
        .column_iter()
        .all(|c| distance_to_span(outer, &c.into_owned()) <= SUBSPACE_TOLERANCE)
}

/// Mass fraction of `[V]` under `m` together with the conditioned measure,
/// or `None` when `[V]` is null.
fn condition(
    m: &MeasureSpec,
    basis: &DMatrix<f64>,
) -> Result<Option<(f64, MeasureSpec)>, MeasureError> {
    let ambient = m.dim() + 1;
    match m {
        MeasureSpec::Round(_) => Ok((basis.ncols() == ambient).then(|| (1.0, m.clone()))),
        MeasureSpec::Subsphere(s) => {
            if contains_subspace(basis, s.basis()) {
                Ok(Some((1.0, m.clone())))
            } else {
                Ok(None)
            }
        }
        MeasureSpec::Atomic(_) | MeasureSpec::Orbit(_) => {
            let a = m.as_atomic().expect("atomic kinds");
            let kept: Vec<_> = a
                .atoms()
                .iter()
                .filter(|at| distance_to_span(basis, at.point.coords()) <= SUBSPACE_TOLERANCE)
                .map(|at| (at.point.clone(), at.weight.clone()))
                .collect();
            if kept.is_empty() {
                return Ok(None);
            }
            let fraction: f64 = kept.iter().map(|(_, w)| rational_to_f64(w)).sum();
            Ok(Some((fraction, AtomicMeasure::new(kept)?.into())))
        }
        MeasureSpec::Mixture(mix) => {
            let mut parts = Vec::new();
            let mut total = 0.0;
            for (c, comp) in mix.components() {
                if *c == 0.0 {
                    continue;
                }
                if let Some((p, cond)) = condition(comp, basis)? {
                    total += c * p;
                    parts.push((c * p, cond));
                }
            }
            if parts.is_empty() {
                return Ok(None);
            }
            let parts = parts.into_iter().map(|(w, cm)| (w / total, cm)).collect();
            Ok(Some((total, Mixture::new(parts)?.into())))
        }
        MeasureSpec::Restricted(r) => match r.materialized() {
            Some(a) => condition(&MeasureSpec::Atomic(a.clone()), basis),
            None => Err(MeasureError::Unsupported(
                "conditioning a restricted continuous measure on a subspace".into(),
            )),
        },
    }
}

/// `λ|_{[V]} / λ([V])` for the subspace `V` spanned by `spanning`.
pub fn restrict_to_subspace(
    base: &MeasureSpec,
    spanning: &[Vec<f64>],
) -> Result<MeasureSpec, MeasureError> {
    let basis = orthonormal_basis(base.dim(), spanning)?;
    if basis.ncols() == base.dim() + 1 {
        return Ok(base.clone());
    }
    match condition(base, &basis)? {
        Some((_, m)) => Ok(m),
        None => Err(MeasureError::EmptyRestriction),
    }
}
