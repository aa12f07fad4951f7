use super::{MeasureError, MeasureEstimate, SupportSubspace, BOUNDARY_TOLERANCE};
use crate::geom::{ProjectiveAction, ProjectiveMap, Region, UnitPoint, MATCH_TOLERANCE};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::VecDeque;

/// A point of `RP^n` (stored by its canonical sphere representative) with a
/// probability weight. On `S^n` both `±point` carry the full weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: UnitPoint,
    pub weight: BigRational,
}

/// Finitely many projective atoms with exact rational weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

pub(crate) fn rational_from_f64(w: f64) -> Result<BigRational, MeasureError> {
    BigRational::from_float(w)
        .ok_or_else(|| MeasureError::InvalidWeights(format!("non-finite weight {w}")))
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl AtomicMeasure {
    /// Merges projectively equal points (within the matching tolerance) and
    /// rescales the weights to sum to 1.
    pub fn new(atoms: Vec<(UnitPoint, BigRational)>) -> Result<Self, MeasureError> {
        let Some(first) = atoms.first() else {
            return Err(MeasureError::InvalidWeights("no atoms".into()));
        };
        let dim = first.0.ambient_dim();
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            if p.ambient_dim() != dim {
                return Err(MeasureError::DimensionMismatch {
                    expected: dim,
                    found: p.ambient_dim(),
                });
            }
            if !w.is_positive() {
                return Err(MeasureError::InvalidWeights(format!("non-positive weight {w}")));
            }
            let p = p.canonical();
            match merged
                .iter_mut()
                .find(|a| a.point.projectively_eq(&p, MATCH_TOLERANCE))
            {
                Some(a) => a.weight += w,
                None => merged.push(Atom { point: p, weight: w }),
            }
        }
        let total: BigRational = merged.iter().map(|a| a.weight.clone()).sum();
        for a in &mut merged {
            a.weight = &a.weight / &total;
        }
        Ok(Self {
            dim,
            atoms: merged,
        })
    }

    pub fn from_f64_weights(atoms: Vec<(UnitPoint, f64)>) -> Result<Self, MeasureError> {
        let atoms = atoms
            .into_iter()
            .map(|(p, w)| Ok((p, rational_from_f64(w)?)))
            .collect::<Result<Vec<_>, MeasureError>>()?;
        Self::new(atoms)
    }

    /// Probability one at the projective point `±p`.
    pub fn dirac(p: UnitPoint) -> Self {
        Self::new(vec![(p, BigRational::one())]).expect("single positive atom")
    }

    /// Equal weights on `points` (after merging duplicates).
    pub fn uniform(points: Vec<UnitPoint>) -> Result<Self, MeasureError> {
        Self::new(points.into_iter().map(|p| (p, BigRational::one())).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn side_of(&self, point: &UnitPoint, region: &Region) -> Result<bool, MeasureError> {
        let mut inside = true;
        for h in region.halves() {
            let s = h.side(point.coords());
            if s.abs() <= BOUNDARY_TOLERANCE {
                return Err(MeasureError::BoundaryAtom {
                    atom: point.to_vec(),
                    normal: h.normal().iter().copied().collect(),
                });
            }
            inside &= s > 0.0;
        }
        Ok(inside)
    }

    /// Exact mass on `S^n` of the union of `regions`.
    pub fn mass(&self, regions: &[Region]) -> Result<BigRational, MeasureError> {
        let mut total = BigRational::zero();
        for a in &self.atoms {
            let anti = a.point.antipode();
            let mut plus = false;
            let mut minus = false;
            for r in regions {
                plus |= self.side_of(&a.point, r)?;
                minus |= self.side_of(&anti, r)?;
            }
            let copies = u8::from(plus) + u8::from(minus);
            if copies > 0 {
                total += &a.weight * BigRational::from_integer(BigInt::from(copies));
            }
        }
        Ok(total)
    }

    pub(crate) fn eval_union(&self, regions: &[Region]) -> Result<MeasureEstimate, MeasureError> {
        Ok(MeasureEstimate::exact(rational_to_f64(&self.mass(regions)?)))
    }

    pub fn support(&self) -> Vec<SupportSubspace> {
        self.atoms
            .iter()
            .map(|a| SupportSubspace {
                basis: DMatrix::from_column_slice(self.dim + 1, 1, a.point.coords().as_slice()),
            })
            .collect()
    }

    /// Push-forward `g_*λ`: `(g_*λ)(E) = λ(g⁻¹E)`.
    pub fn push_forward(&self, g: &ProjectiveMap) -> Result<Self, MeasureError> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((a.point.transformed(g)?, a.weight.clone())))
            .collect::<Result<Vec<_>, MeasureError>>()?;
        Self::new(atoms)
    }

    /// Whether `g` permutes the atoms preserving weights.
    pub fn is_invariant_under(&self, g: &ProjectiveMap) -> Result<bool, MeasureError> {
        for a in &self.atoms {
            let image = a.point.transformed(g)?;
            let matched = self
                .atoms
                .iter()
                .find(|b| b.point.projectively_eq(&image, MATCH_TOLERANCE));
            match matched {
                Some(b) if b.weight == a.weight => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// Checks that `group` is closed under composition and inverses.
pub fn verify_group(group: &[ProjectiveMap]) -> Result<(), MeasureError> {
    let contains = |h: &ProjectiveMap| group.iter().any(|g| g.projectively_eq(h, MATCH_TOLERANCE));
    if group.is_empty() {
        return Err(MeasureError::NotAGroup("empty list".into()));
    }
    for (i, a) in group.iter().enumerate() {
        if !contains(&a.inverse()) {
            return Err(MeasureError::NotAGroup(format!("inverse of element {i} missing")));
        }
        for (j, b) in group.iter().enumerate() {
            if !contains(&a.compose(b)) {
                return Err(MeasureError::NotAGroup(format!(
                    "product of elements {i} and {j} missing"
                )));
            }
        }
    }
    Ok(())
}

/// Averages an atomic base measure over a finite group:
/// `λ(E) = (1/|H|) Σ_h λ₀(hE)`, whose atoms are `h⁻¹·b` with weight
/// `w_b / |H|`. The result is exactly invariant under every element.
pub fn average_over_group(
    base: &super::MeasureSpec,
    group: &[ProjectiveMap],
) -> Result<AtomicMeasure, MeasureError> {
    let base = base.as_atomic().ok_or(MeasureError::NonAtomicBase)?;
    verify_group(group)?;
    let order = BigRational::from_integer(BigInt::from(group.len()));
    let mut atoms = Vec::with_capacity(group.len() * base.len());
    for h in group {
        let inv = h.inverse();
        for b in base.atoms() {
            atoms.push((b.point.transformed(&inv)?, &b.weight / &order));
        }
    }
    AtomicMeasure::new(atoms)
}

/// Equal-weight measure on a finite orbit of the group generated by
/// `generators`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOrbitMeasure {
    seed: UnitPoint,
    generators: Vec<ProjectiveMap>,
    max_orbit: usize,
    atomic: AtomicMeasure,
}

impl FiniteOrbitMeasure {
    pub fn atomic(&self) -> &AtomicMeasure {
        &self.atomic
    }

    pub fn seed(&self) -> &UnitPoint {
        &self.seed
    }

    pub fn generators(&self) -> &[ProjectiveMap] {
        &self.generators
    }

    pub fn max_orbit(&self) -> usize {
        self.max_orbit
    }

    pub fn orbit(&self) -> Vec<UnitPoint> {
        self.atomic.atoms().iter().map(|a| a.point.clone()).collect()
    }
}

/// Breadth-first orbit of `seed` under the generators and their inverses,
/// with points identified projectively.
pub fn finite_orbit_measure(
    seed: &UnitPoint,
    generators: &[ProjectiveMap],
    max_orbit: usize,
) -> Result<FiniteOrbitMeasure, MeasureError> {
    if max_orbit == 0 {
        return Err(MeasureError::InvalidArgument("max_orbit must be at least 1".into()));
    }
    for g in generators {
        if g.ambient_dim() != seed.ambient_dim() {
            return Err(MeasureError::DimensionMismatch {
                expected: seed.ambient_dim(),
                found: g.ambient_dim(),
            });
        }
    }
    let moves: Vec<ProjectiveMap> = generators
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    let mut orbit = vec![seed.canonical()];
    let mut queue = VecDeque::from([seed.canonical()]);
    while let Some(p) = queue.pop_front() {
        for g in &moves {
            let q = p.transformed(g)?.canonical();
            if !orbit.iter().any(|o| o.projectively_eq(&q, MATCH_TOLERANCE)) {
                if orbit.len() == max_orbit {
                    return Err(MeasureError::OrbitOverflow { max_orbit });
                }
                orbit.push(q.clone());
                queue.push_back(q);
            }
        }
    }
    Ok(FiniteOrbitMeasure {
        seed: seed.clone(),
        generators: generators.to_vec(),
        max_orbit,
        atomic: AtomicMeasure::uniform(orbit)?,
    })
}
