//! Measure-theoretic angles of a spherical simplex and the spherical
//! Gauss–Bonnet identity.
//!
//! For a simplex `s ⊂ S^n` with planes `H_0, …, H_n` and a cut set `T`, the
//! face `s^r` (`r = n - |T|`) has angle `α(s^r, s^n) = ½ λ(∩_{i∈T} H_i^+)`.
//! The alternating sum
//!
//! ```text
//! k(s^n) = Σ_{|T| ≤ n} (-1)^{n-|T|} α(T)
//! ```
//!
//! runs over every face including `s^n` itself (`T = ∅`, angle 1), and for an
//! antipodally invariant `λ` satisfies `2k = (1 + (-1)^n) λ(s^n)`.

use crate::geom::{CutSet, SphericalSimplex};
use crate::measure::{AtomicMeasure, McConfig, MeasureError, MeasureEstimate, MeasureSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleValue {
    #[serde(serialize_with = "serialize_cut")]
    pub cut: CutSet,
    pub estimate: MeasureEstimate,
}

fn serialize_cut<S: serde::Serializer>(cut: &CutSet, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(cut.indices())
}

fn sign(exponent: usize) -> f64 {
    if exponent.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `α = ½ λ(face_region(T))`, sampled with a seed derived from `T`.
pub fn angle(
    s: &SphericalSimplex,
    cut: CutSet,
    measure: &MeasureSpec,
    mc: &McConfig,
) -> Result<AngleValue, MeasureError> {
    let region = s.face_region(cut)?;
    let estimate = measure.eval(&region, &mc.derive(cut.bits()))?.scale(0.5);
    Ok(AngleValue { cut, estimate })
}

/// Every cut set of a face of `s`, i.e. `|T| ≤ n`, in increasing bit order.
pub fn face_cuts(s: &SphericalSimplex) -> Vec<CutSet> {
    let planes = s.dim() + 1;
    CutSet::all(planes).filter(|c| c.len() < planes).collect()
}

/// Angles at every face, in the order of [`face_cuts`].
pub fn all_angles(
    s: &SphericalSimplex,
    measure: &MeasureSpec,
    mc: &McConfig,
) -> Result<Vec<AngleValue>, MeasureError> {
    face_cuts(s)
        .into_par_iter()
        .map(|cut| angle(s, cut, measure, mc))
        .collect()
}

/// `k(s^n)`; errors of independent angle estimates add in quadrature.
pub fn k_value(
    s: &SphericalSimplex,
    measure: &MeasureSpec,
    mc: &McConfig,
) -> Result<MeasureEstimate, MeasureError> {
    let n = s.dim();
    let angles = all_angles(s, measure, mc)?;
    Ok(MeasureEstimate::combine(
        angles.iter().map(|a| (sign(n - a.cut.len()), a.estimate)),
    ))
}

/// `k(s^n)` for an atomic measure in exact arithmetic.
pub fn k_value_exact(s: &SphericalSimplex, measure: &AtomicMeasure) -> Result<BigRational, MeasureError> {
    let n = s.dim();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut k = BigRational::zero();
    for cut in face_cuts(s) {
        let a = measure.mass(&[s.face_region(cut)?])? * &half;
        if (n - cut.len()).is_multiple_of(2) {
            k += a;
        } else {
            k -= a;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SgbResult {
    pub k: MeasureEstimate,
    /// `λ(s^n)`.
    pub interior: MeasureEstimate,
    /// `2k - (1 + (-1)^n) λ(s^n)`.
    pub residual: MeasureEstimate,
}

pub fn sgb_residual(
    s: &SphericalSimplex,
    measure: &MeasureSpec,
    mc: &McConfig,
) -> Result<SgbResult, MeasureError> {
    let k = k_value(s, measure, mc)?;
    let full = CutSet::full(s.dim() + 1);
    let interior = measure.eval(&s.interior_region(), &mc.derive(full.bits()))?;
    let factor = 1.0 + sign(s.dim());
    let residual = MeasureEstimate::combine([(2.0, k), (-factor, interior)]);
    Ok(SgbResult {
        k,
        interior,
        residual,
    })
}

/// `Σ_T (-1)^{|T|} λ(face_region(T))` over every `T` including the full set,
/// the expansion of `∫ Π(1 - f_i) dλ`; equals the measure of `-s`.
pub fn inclusion_exclusion(
    s: &SphericalSimplex,
    measure: &MeasureSpec,
    mc: &McConfig,
) -> Result<MeasureEstimate, MeasureError> {
    let terms = CutSet::all(s.dim() + 1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|cut| {
            let e = measure.eval(&s.face_region(cut)?, &mc.derive(cut.bits()))?;
            Ok((sign(cut.len()), e))
        })
        .collect::<Result<Vec<_>, MeasureError>>()?;
    Ok(MeasureEstimate::combine(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::UnitPoint;
    use crate::measure::RoundMeasure;

    fn octant() -> SphericalSimplex {
        SphericalSimplex::from_vertices(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap()
    }

    fn round2() -> MeasureSpec {
        RoundMeasure::new(2).into()
    }

    #[test]
    fn octant_angles() {
        let s = octant();
        let mc = McConfig::default();
        // Vertex e3 is cut out by planes 0 and 1.
        let v = angle(&s, CutSet::from_indices([0, 1]), &round2(), &mc).unwrap();
        assert!((v.estimate.value - 0.25).abs() < 1e-15);
        for i in 0..3 {
            let e = angle(&s, CutSet::from_indices([i]), &round2(), &mc).unwrap();
            assert_eq!(e.estimate.value, 0.5);
        }
        let whole = angle(&s, CutSet::EMPTY, &round2(), &mc).unwrap();
        assert_eq!(whole.estimate.value, 1.0);
    }

    #[test]
    fn octant_k_and_residual() {
        let r = sgb_residual(&octant(), &round2(), &McConfig::default()).unwrap();
        assert!((r.k.value - 0.25).abs() < 1e-12);
        assert!(r.residual.value.abs() < 1e-12);
        assert!(r.k.is_exact());
    }

    #[test]
    fn arc_k_vanishes() {
        let s = SphericalSimplex::from_vertices(&[vec![1.0, 0.0], vec![0.3, 0.8]]).unwrap();
        let m: MeasureSpec = RoundMeasure::new(1).into();
        let r = sgb_residual(&s, &m, &McConfig::default()).unwrap();
        assert_eq!(r.k.value, 0.0);
        assert_eq!(r.residual.value, 0.0);
    }

    #[test]
    fn diagonal_atom_in_octant() {
        let a = AtomicMeasure::dirac(UnitPoint::new(vec![1.0, 1.0, 1.0]).unwrap());
        let s = octant();
        let k = k_value_exact(&s, &a).unwrap();
        assert_eq!(k, a.mass(&[s.interior_region()]).unwrap());
        assert_eq!(k, BigRational::from_integer(BigInt::from(1)));
        let m: MeasureSpec = a.into();
        let r = sgb_residual(&s, &m, &McConfig::default()).unwrap();
        assert_eq!(r.residual.value, 0.0);
    }

    #[test]
    fn random_simplex_monte_carlo() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s = SphericalSimplex::random(&mut rng, 2);
        let m: MeasureSpec = RoundMeasure::monte_carlo(2).into();
        let r = sgb_residual(&s, &m, &McConfig::new(7, 1_000_000)).unwrap();
        assert!(r.residual.std_error > 0.0);
        assert!(r.residual.value.abs() <= 4.0 * r.residual.std_error, "{r:?}");
    }

    #[test]
    fn inclusion_exclusion_gives_antipodal_simplex() {
        let s = octant();
        let lhs = inclusion_exclusion(&s, &round2(), &McConfig::default()).unwrap();
        let rhs = round2()
            .eval(&s.antipodal().interior_region(), &McConfig::default())
            .unwrap();
        assert!((lhs.value - rhs.value).abs() < 1e-12);
    }
}
