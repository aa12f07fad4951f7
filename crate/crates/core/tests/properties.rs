mod common;

use common::{random_atomic, random_glued_surface, random_map, random_rational, random_rotation};
use gbm_core::complex::gauss_bonnet_terms;
use gbm_core::geom::{CutSet, Hyperplane, ProjectiveAction, Region, SphericalSimplex, UnitPoint};
use gbm_core::measure::{
    average_over_group, check_invariance, random_region, AtomicMeasure, McConfig, MeasureSpec, RoundMeasure,
    Tolerances,
};
use gbm_core::pullback::{
    covering_independence, equivariance_check, pullback, quotient_round_trip, turn, AdaptedCovering,
    CircleAtomicMeasure, CircleMap,
};
use gbm_core::simplex::{angle, inclusion_exclusion, k_value, k_value_exact};
use gbm_core::symmetry::octahedral_group;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mc() -> McConfig {
    McConfig::new(0, 10_000)
}

fn random_cut(rng: &mut ChaCha8Rng, dim: usize) -> CutSet {
    CutSet::from_bits(rng.random_range(0..CutSet::full(dim + 1).bits()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn face_regions_are_equivariant(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let s = SphericalSimplex::random(&mut r, dim);
        let g = random_map(&mut r, dim);
        let gs = s.transformed(&g).unwrap();
        let cut = random_cut(&mut r, dim);
        let (region, image) = (s.face_region(cut).unwrap(), gs.face_region(cut).unwrap());
        for _ in 0..20 {
            let x = UnitPoint::random(&mut r, dim);
            let margin = region.halves().iter().map(|h| h.side(x.coords()).abs()).fold(f64::INFINITY, f64::min);
            if margin < 1e-6 {
                continue;
            }
            let gx = x.transformed(&g).unwrap();
            prop_assert_eq!(region.contains_point(&x), image.contains_point(&gx));
        }
    }

    #[test]
    fn vertex_scaling_keeps_planes(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let s = SphericalSimplex::random(&mut r, dim);
        let rows: Vec<Vec<f64>> = s
            .vertices()
            .iter()
            .map(|v| {
                let c: f64 = r.random_range(0.1..10.0);
                v.to_vec().iter().map(|x| x * c).collect()
            })
            .collect();
        let scaled = SphericalSimplex::from_vertices(&rows).unwrap();
        for (a, b) in s.planes().iter().zip(scaled.planes()) {
            prop_assert!(a.approx_eq(b, 1e-9));
        }
    }

    #[test]
    fn barycenter_is_strictly_inside(seed in any::<u64>(), dim in 1usize..=5) {
        let s = SphericalSimplex::random(&mut rng(seed), dim);
        let b = s.barycenter();
        prop_assert!(s.planes().iter().all(|h| h.side(b.coords()) > 0.0));
    }

    #[test]
    fn half_space_splits_are_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let round: MeasureSpec = RoundMeasure::new(2).into();
        let atomic: MeasureSpec = random_atomic(&mut r, 2, 6).into();
        let base = random_region(&mut r, 2, 1);
        let h = Hyperplane::new((0..3).map(|_| r.random_range(-1.0..1.0)).collect::<Vec<f64>>()).unwrap();
        let plus = base.with_half(h.clone()).unwrap();
        let minus = base.with_half(h.flipped()).unwrap();
        let whole = round.eval(&base, &mc()).unwrap().value;
        let parts = round.eval(&plus, &mc()).unwrap().value + round.eval(&minus, &mc()).unwrap().value;
        prop_assert!((whole - parts).abs() < 1e-12);

        let a = atomic.as_atomic().unwrap();
        let three = random_region(&mut r, 2, 3);
        let plus = three.with_half(h.clone()).unwrap();
        let minus = three.with_half(h.flipped()).unwrap();
        prop_assert_eq!(a.mass(&[three]).unwrap(), a.mass(&[plus]).unwrap() + a.mass(&[minus]).unwrap());
    }

    #[test]
    fn antipodal_invariance(seed in any::<u64>(), halves in 1usize..=3) {
        let mut r = rng(seed);
        let region = random_region(&mut r, 2, halves);
        let a = random_atomic(&mut r, 2, 5);
        prop_assert_eq!(a.mass(std::slice::from_ref(&region)).unwrap(), a.mass(&[region.antipodal()]).unwrap());
        let round: MeasureSpec = RoundMeasure::new(2).into();
        let x = round.eval(&region, &mc()).unwrap().value;
        let y = round.eval(&region.antipodal(), &mc()).unwrap().value;
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn inclusion_exclusion_gives_the_antipodal_simplex(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let s = SphericalSimplex::random(&mut r, dim);
        let m: MeasureSpec = random_atomic(&mut r, dim, 8).into();
        let sum = inclusion_exclusion(&s, &m, &mc()).unwrap().value;
        let anti = m.eval(&s.antipodal().interior_region(), &mc()).unwrap().value;
        prop_assert!((sum - anti).abs() < 1e-12);
    }

    #[test]
    fn k_is_the_interior_mass_or_zero(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let s = SphericalSimplex::random(&mut r, dim);
        let a = random_atomic(&mut r, dim, 8);
        let k = k_value_exact(&s, &a).unwrap();
        if dim % 2 == 0 {
            prop_assert_eq!(k, a.mass(&[s.interior_region()]).unwrap());
        } else {
            prop_assert!(k.is_zero());
        }
        if dim <= 2 {
            let round: MeasureSpec = RoundMeasure::new(dim).into();
            let k = k_value(&s, &round, &mc()).unwrap().value;
            let expected = if dim % 2 == 0 { round.eval(&s.interior_region(), &mc()).unwrap().value } else { 0.0 };
            prop_assert!((k - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn angles_shrink_as_cuts_grow(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let s = SphericalSimplex::random(&mut r, dim);
        let m: MeasureSpec = random_atomic(&mut r, dim, 10).into();
        let cut = random_cut(&mut r, dim);
        let bigger = CutSet::from_bits(cut.bits() | (1 << r.random_range(0..=dim)));
        if bigger.len() <= dim {
            let a = angle(&s, cut, &m, &mc()).unwrap().estimate.value;
            let b = angle(&s, bigger, &m, &mc()).unwrap().estimate.value;
            prop_assert!(b <= a + 1e-15);
        }
    }

    #[test]
    fn invariant_measures_give_equivariant_angles(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = SphericalSimplex::random(&mut r, 2);
        let cut = random_cut(&mut r, 2);
        let round: MeasureSpec = RoundMeasure::new(2).into();
        let g = random_rotation(&mut r);
        let gs = s.transformed(&g).unwrap();
        let a = angle(&s, cut, &round, &mc()).unwrap().estimate.value;
        let b = angle(&gs, cut, &round, &mc()).unwrap().estimate.value;
        prop_assert!((a - b).abs() < 1e-12);

        let group = octahedral_group();
        let avg: MeasureSpec = average_over_group(&random_atomic(&mut r, 2, 3).into(), &group).unwrap().into();
        let h = &group[r.random_range(0..group.len())];
        let hs = s.transformed(h).unwrap();
        prop_assert_eq!(
            angle(&s, cut, &avg, &mc()).unwrap().estimate.value,
            angle(&hs, cut, &avg, &mc()).unwrap().estimate.value
        );
    }

    #[test]
    fn averaged_measures_are_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let group = octahedral_group();
        let avg: MeasureSpec = average_over_group(&random_atomic(&mut r, 2, 4).into(), &group).unwrap().into();
        let regions: Vec<Region> = (0..10).map(|_| random_region(&mut r, 2, 2)).collect();
        let report = check_invariance(&avg, &group, &regions, &mc(), &Tolerances::default()).unwrap();
        prop_assert!(report.pass);
        prop_assert_eq!(report.max_discrepancy, 0.0);
    }

    #[test]
    fn rearrangement_identity(seed in any::<u64>(), half in 1usize..=12) {
        let mut r = rng(seed);
        let complex = random_glued_surface(&mut r, 2 * half);
        let table: Vec<Vec<BigRational>> =
            (0..complex.top_count()).map(|_| (0..8).map(|_| random_rational(&mut r)).collect()).collect();
        let terms = gauss_bonnet_terms(&complex, &table).unwrap();
        prop_assert!(terms.residual.is_zero());
        prop_assert_eq!(terms.chi, complex.euler());
    }

    #[test]
    fn pullback_mass_scales_with_degree(seed in any::<u64>(), k in -4i64..=4, atoms in 1usize..=5) {
        prop_assume!(k != 0);
        let mut r = rng(seed);
        let lambda = random_circle_measure(&mut r, atoms);
        let f = CircleMap::power(k).unwrap();
        let a = AdaptedCovering::random(&f, &lambda, &mut r);
        let b = AdaptedCovering::random(&f, &lambda, &mut r);
        let up = pullback(&f, &lambda, &a).unwrap();
        prop_assert_eq!(up.total(), lambda.total() * BigRational::from_integer(BigInt::from(k.abs())));
        prop_assert!(covering_independence(&f, &lambda, &a, &b).unwrap().pass);
        prop_assert!(equivariance_check(&f, &lambda, &a).unwrap().pass);
        let cover = AdaptedCovering::standard(&f, &lambda);
        prop_assert!(quotient_round_trip(&f, &up, &cover).unwrap().pass);
    }

    #[test]
    fn pullbacks_compose(seed in any::<u64>(), a in 1i64..=4, b in -3i64..=3) {
        prop_assume!(b != 0);
        let mut r = rng(seed);
        let lambda = random_circle_measure(&mut r, 3);
        let (f, g) = (CircleMap::power(a).unwrap(), CircleMap::power(b).unwrap());
        let mid = pullback(&g, &lambda, &AdaptedCovering::random(&g, &lambda, &mut r)).unwrap();
        let twice = pullback(&f, &mid, &AdaptedCovering::random(&f, &mid, &mut r)).unwrap();
        let h = f.then(&g);
        let once = pullback(&h, &lambda, &AdaptedCovering::random(&h, &lambda, &mut r)).unwrap();
        prop_assert_eq!(twice, once);
    }
}

fn random_circle_measure(r: &mut ChaCha8Rng, atoms: usize) -> CircleAtomicMeasure {
    let mut list: Vec<(BigRational, BigRational)> = Vec::new();
    while list.len() < atoms {
        let t = turn(r.random_range(0..360), 360);
        if list.iter().all(|(u, _)| *u != t) {
            list.push((t, turn(r.random_range(1..10), r.random_range(1..5))));
        }
    }
    CircleAtomicMeasure::new(list).unwrap()
}

#[test]
fn glued_surfaces_are_closed() {
    let mut r = rng(11);
    for t in [2, 4, 10, 50] {
        let c = random_glued_surface(&mut r, t);
        c.check_closed_manifold().unwrap();
        assert_eq!(c.top_count(), t);
    }
}

#[test]
fn monte_carlo_octant_is_unbiased() {
    let s = SphericalSimplex::from_vertices(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
    let m: MeasureSpec = RoundMeasure::monte_carlo(2).into();
    let estimates: Vec<_> = (0..100)
        .map(|seed| m.eval(&s.interior_region(), &McConfig::new(seed, 20_000)).unwrap())
        .collect();
    let mean = estimates.iter().map(|e| e.value).sum::<f64>() / 100.0;
    let pooled = (estimates.iter().map(|e| e.std_error.powi(2)).sum::<f64>()).sqrt() / 100.0;
    assert!((mean - 0.25).abs() <= 4.0 * pooled, "{mean} vs 0.25 ± {pooled}");
}

#[test]
fn supports_are_exposed() {
    let round: MeasureSpec = RoundMeasure::new(2).into();
    assert!(round.support().is_empty());
    let atoms: MeasureSpec = AtomicMeasure::dirac(UnitPoint::new(vec![1.0, 2.0, 3.0]).unwrap()).into();
    assert_eq!(atoms.support().len(), 1);
    assert_eq!(atoms.support()[0].rank(), 1);
}
