use super::monte_carlo::count_hits;
use super::{check_samples, McConfig, MeasureError, MeasureEstimate, SupportSubspace};
use crate::geom::{Hyperplane, Region};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Distinct normals of a region; `None` when two of them are antipodal and
/// the (open) region is empty.
fn distinct_normals(halves: &[Hyperplane]) -> Option<Vec<&DVector<f64>>> {
    let mut kept: Vec<&DVector<f64>> = Vec::with_capacity(halves.len());
    for h in halves {
        let u = h.normal();
        if kept.iter().any(|k| (*k - u).amax() <= DUPLICATE_TOLERANCE) {
            continue;
        }
        if kept.iter().any(|k| (*k + u).amax() <= DUPLICATE_TOLERANCE) {
            return None;
        }
        kept.push(u);
    }
    Some(kept)
}

fn angle_between(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Closed-form uniform mass (total 2) of a region, when one is available:
/// any dimension with at most two distinct half-spaces (whole sphere,
/// hemisphere, lune), `S^0` and `S^1` always, and on `S^2` three
/// independent half-spaces (a spherical triangle, by angle excess).
pub(crate) fn exact_round_mass(dim: usize, region: &Region) -> Option<f64> {
    let Some(normals) = distinct_normals(region.halves()) else {
        return Some(0.0);
    };
    match (dim, normals.len()) {
        (0, _) => Some(points_of_s0_inside(std::slice::from_ref(region))),
        (_, 0) => Some(2.0),
        (_, 1) => Some(1.0),
        // Lune of opening π - θ; its share of the sphere is (π - θ) / 2π.
        (_, 2) => Some((PI - angle_between(normals[0], normals[1])) / PI),
        (1, _) => Some(arc_union_mass(std::slice::from_ref(region))),
        (2, 3) => {
            let m = DMatrix::from_columns(&[normals[0].clone(), normals[1].clone(), normals[2].clone()]);
            if m.determinant().abs() <= DUPLICATE_TOLERANCE {
                return None;
            }
            // Triangle with interior angles π - θ_ij: area = 2π - Σ θ_ij.
            let theta = angle_between(normals[0], normals[1])
                + angle_between(normals[0], normals[2])
                + angle_between(normals[1], normals[2]);
            Some((2.0 * PI - theta) / (2.0 * PI))
        }
        _ => None,
    }
}

fn points_of_s0_inside(regions: &[Region]) -> f64 {
    [1.0, -1.0]
        .iter()
        .filter(|&&s| {
            let p = DVector::from_element(1, s);
            regions.iter().any(|r| r.contains(&p))
        })
        .count() as f64
}

/// Uniform mass of a union of regions of `S^1`: the circle is cut at every
/// half-plane boundary and each piece is tested at its midpoint.
pub(crate) fn arc_union_mass(regions: &[Region]) -> f64 {
    if regions.is_empty() {
        return 0.0;
    }
    let two_pi = 2.0 * PI;
    let mut cuts: Vec<f64> = regions
        .iter()
        .flat_map(|r| r.halves().iter())
        .flat_map(|h| {
            let phi = h.normal()[1].atan2(h.normal()[0]);
            [
                (phi + PI / 2.0).rem_euclid(two_pi),
                (phi - PI / 2.0).rem_euclid(two_pi),
            ]
        })
        .collect();
    if cuts.is_empty() {
        // Every region is the whole circle.
        return 2.0;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut length = 0.0;
    for i in 0..cuts.len() {
        let start = cuts[i];
        let end = if i + 1 < cuts.len() {
            cuts[i + 1]
        } else {
            cuts[0] + two_pi
        };
        let mid = 0.5 * (start + end);
        let p = DVector::from_vec(vec![mid.cos(), mid.sin()]);
        if regions.iter().any(|r| r.contains(&p)) {
            length += end - start;
        }
    }
    length / PI
}

/// The rotation-invariant measure of `S^n`, normalized to total mass 2.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundMeasure {
    dim: usize,
    monte_carlo: bool,
}

impl RoundMeasure {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            monte_carlo: false,
        }
    }

    /// Evaluates every region by Monte Carlo, even where a closed form exists.
    pub fn monte_carlo(dim: usize) -> Self {
        Self {
            dim,
            monte_carlo: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.monte_carlo
    }

    pub(crate) fn eval_union(
        &self,
        regions: &[Region],
        mc: &McConfig,
    ) -> Result<MeasureEstimate, MeasureError> {
        if regions.is_empty() {
            return Ok(MeasureEstimate::exact(0.0));
        }
        if !self.monte_carlo {
            if let [single] = regions {
                if let Some(v) = exact_round_mass(self.dim, single) {
                    return Ok(MeasureEstimate::exact(v));
                }
            }
            match self.dim {
                0 => return Ok(MeasureEstimate::exact(points_of_s0_inside(regions))),
                1 => return Ok(MeasureEstimate::exact(arc_union_mass(regions))),
                _ => {}
            }
        }
        check_samples(mc)?;
        let hits = count_hits(mc, self.dim + 1, None, |x| {
            regions.iter().any(|r| r.contains(x))
        });
        Ok(MeasureEstimate::from_hits(hits, mc.samples, 2.0))
    }
}

/// Uniform measure on the great subsphere `[V] ∩ S^n`, total mass 2.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsphereUniform {
    dim: usize,
    basis: DMatrix<f64>,
    monte_carlo: bool,
}

impl SubsphereUniform {
    /// `V` is the span of `spanning`; it is orthonormalized here.
    pub fn new(dim: usize, spanning: &[Vec<f64>]) -> Result<Self, MeasureError> {
        if spanning.is_empty() || spanning.len() > dim + 1 {
            return Err(MeasureError::DegenerateSubspace);
        }
        let mut columns: Vec<DVector<f64>> = Vec::with_capacity(spanning.len());
        for v in spanning {
            if v.len() != dim + 1 {
                return Err(MeasureError::DimensionMismatch {
                    expected: dim,
                    found: v.len().saturating_sub(1),
                });
            }
            let mut w = DVector::from_vec(v.clone());
            let scale = w.norm();
            for c in &columns {
                let proj = c.dot(&w);
                w -= c * proj;
            }
            let norm = w.norm();
            if scale == 0.0 || norm <= 1e-9 * scale {
                return Err(MeasureError::DegenerateSubspace);
            }
            columns.push(w / norm);
        }
        Ok(Self {
            dim,
            basis: DMatrix::from_columns(&columns),
            monte_carlo: false,
        })
    }

    /// The great circle `x_n = 0` of `S^2` and its analogues: the hyperplane
    /// at infinity of the affine chart `x_n = 1`.
    pub fn at_infinity(dim: usize) -> Self {
        let spanning: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                let mut v = vec![0.0; dim + 1];
                v[i] = 1.0;
                v
            })
            .collect();
        Self::new(dim, &spanning).expect("coordinate hyperplane")
    }

    pub fn with_monte_carlo(mut self, on: bool) -> Self {
        self.monte_carlo = on;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subsphere.
    pub fn sub_dim(&self) -> usize {
        self.basis.ncols() - 1
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn is_monte_carlo(&self) -> bool {
        self.monte_carlo
    }

    pub fn spanning_vectors(&self) -> Vec<Vec<f64>> {
        self.basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    /// The region `R ∩ [V]` in coordinates of the subsphere.
    pub fn reduce(&self, region: &Region) -> Result<Region, MeasureError> {
        let halves = region
            .halves()
            .iter()
            .map(|h| {
                let reduced = self.basis.transpose() * h.normal();
                if reduced.norm() <= super::BOUNDARY_TOLERANCE {
                    return Err(MeasureError::BoundaryDegenerate {
                        normal: h.normal().iter().copied().collect(),
                    });
                }
                Ok(Hyperplane::from_vector(reduced)?)
            })
            .collect::<Result<Vec<_>, MeasureError>>()?;
        Ok(Region::new(self.sub_dim(), halves)?)
    }

    pub(crate) fn eval_union(
        &self,
        regions: &[Region],
        mc: &McConfig,
    ) -> Result<MeasureEstimate, MeasureError> {
        let reduced = regions
            .iter()
            .map(|r| self.reduce(r))
            .collect::<Result<Vec<_>, _>>()?;
        let round = RoundMeasure {
            dim: self.sub_dim(),
            monte_carlo: self.monte_carlo,
        };
        round.eval_union(&reduced, mc)
    }

    pub fn support(&self) -> SupportSubspace {
        SupportSubspace {
            basis: self.basis.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{CutSet, SphericalSimplex};
    use crate::measure::MeasureSpec;

    fn region(dim: usize, normals: &[Vec<f64>]) -> Region {
        Region::from_normals(dim, normals).unwrap()
    }

    fn octant() -> SphericalSimplex {
        SphericalSimplex::from_vertices(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn hemisphere_is_one() {
        let m = MeasureSpec::Round(RoundMeasure::new(2));
        let e = m
            .eval(&region(2, &[vec![0.0, 0.0, 1.0]]), &McConfig::default())
            .unwrap();
        assert_eq!(e, MeasureEstimate::exact(1.0));
    }

    #[test]
    fn octant_is_one_quarter() {
        // Girard: three right angles, area 3·(π/2) - π = π/2 of 4π, times 2.
        let girard = (3.0 * PI / 2.0 - PI) / (4.0 * PI) * 2.0;
        let v = exact_round_mass(2, &octant().interior_region()).unwrap();
        assert!((v - girard).abs() < 1e-15);
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn quarter_sphere_lune() {
        let r = octant().face_region(CutSet::from_indices([0, 1])).unwrap();
        assert_eq!(exact_round_mass(2, &r), Some(0.5));
    }

    #[test]
    fn antipodal_halves_are_empty() {
        let r = region(3, &[vec![1.0, 0.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(exact_round_mass(3, &r), Some(0.0));
    }

    #[test]
    fn duplicate_halves_collapse() {
        let r = region(2, &[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert_eq!(exact_round_mass(2, &r), Some(0.5));
    }

    #[test]
    fn circle_arcs() {
        // Three half-circles centred at 0, 60 and 120 degrees meet in a
        // 60 degree arc.
        let n = |deg: f64| {
            let a = deg.to_radians();
            vec![a.cos(), a.sin()]
        };
        let r = region(1, &[n(0.0), n(60.0), n(120.0)]);
        let v = exact_round_mass(1, &r).unwrap();
        assert!((v - (PI / 3.0) / PI).abs() < 1e-14);
        let union = arc_union_mass(&[region(1, &[n(0.0)]), region(1, &[n(90.0)])]);
        assert!((union - 1.5).abs() < 1e-14);
        assert_eq!(arc_union_mass(&[Region::whole(1)]), 2.0);
    }

    #[test]
    fn zero_sphere_counts_points() {
        let m = RoundMeasure::new(0);
        let mc = McConfig::default();
        assert_eq!(m.eval_union(&[Region::whole(0)], &mc).unwrap().value, 2.0);
        assert_eq!(m.eval_union(&[region(0, &[vec![-3.0]])], &mc).unwrap().value, 1.0);
    }

    #[test]
    fn monte_carlo_octant_within_four_sigma() {
        let m = RoundMeasure::monte_carlo(2);
        let e = m
            .eval_union(&[octant().interior_region()], &McConfig::new(9, 200_000))
            .unwrap();
        assert!(e.samples == 200_000 && e.std_error > 0.0);
        assert!((e.value - 0.25).abs() <= 4.0 * e.std_error);
    }

    #[test]
    fn too_few_samples_rejected() {
        let m = RoundMeasure::monte_carlo(2);
        assert!(matches!(
            m.eval_union(&[Region::whole(2)], &McConfig::new(0, 1)),
            Err(MeasureError::TooFewSamples(1))
        ));
    }

    #[test]
    fn subsphere_reduces_to_circle() {
        let inf = SubsphereUniform::at_infinity(2);
        assert_eq!(inf.sub_dim(), 1);
        // Quarter plane of directions {x > 0, y > 0}: a quarter of the circle.
        let r = region(2, &[vec![1.0, 0.0, -3.0], vec![0.0, 1.0, 7.0]]);
        let e = inf.eval_union(&[r], &McConfig::default()).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
        assert!(e.is_exact());
    }

    #[test]
    fn subsphere_inside_hyperplane_is_rejected() {
        let inf = SubsphereUniform::at_infinity(2);
        let r = region(2, &[vec![0.0, 0.0, 1.0]]);
        assert!(matches!(
            inf.eval_union(&[r], &McConfig::default()),
            Err(MeasureError::BoundaryDegenerate { .. })
        ));
    }

    #[test]
    fn dependent_subspace_rejected() {
        let err = SubsphereUniform::new(2, &[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]]);
        assert!(matches!(err, Err(MeasureError::DegenerateSubspace)));
    }
}
