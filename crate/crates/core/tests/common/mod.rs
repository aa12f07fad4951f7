#![allow(dead_code)]

use gbm_core::complex::DeltaComplex;
use gbm_core::geom::{ProjectiveMap, UnitPoint};
use gbm_core::measure::AtomicMeasure;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

/// Closed 2-dimensional Δ-complex from `triangles` (even) triangles whose
/// ordered edges are glued in random pairs, start to start. Vertices may
/// repeat inside a triangle.
pub fn random_glued_surface<R: Rng + ?Sized>(rng: &mut R, triangles: usize) -> DeltaComplex {
    assert!(triangles.is_multiple_of(2) && triangles > 0);
    // Local edges (0,1), (1,2), (0,2) as corner pairs; corner c of triangle t is 3t + c.
    const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];
    let mut slots: Vec<(usize, usize)> = (0..triangles).flat_map(|t| (0..3).map(move |e| (t, e))).collect();
    slots.shuffle(rng);
    let mut parent: Vec<usize> = (0..3 * triangles).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut edge_of = vec![[usize::MAX; 3]; triangles];
    for (i, pair) in slots.chunks(2).enumerate() {
        let [(ta, ea), (tb, eb)] = [pair[0], pair[1]];
        edge_of[ta][ea] = i;
        edge_of[tb][eb] = i;
        for k in 0..2 {
            let ca = 3 * ta + if k == 0 { EDGES[ea].0 } else { EDGES[ea].1 };
            let cb = 3 * tb + if k == 0 { EDGES[eb].0 } else { EDGES[eb].1 };
            let (ra, rb) = (find(&mut parent, ca), find(&mut parent, cb));
            parent[ra] = rb;
        }
    }
    let mut label = vec![usize::MAX; 3 * triangles];
    let mut roots: Vec<usize> = Vec::new();
    for c in 0..3 * triangles {
        let r = find(&mut parent, c);
        let idx = roots.iter().position(|x| *x == r).unwrap_or_else(|| {
            roots.push(r);
            roots.len() - 1
        });
        label[c] = idx;
    }
    let edge_count = slots.len() / 2;
    let mut edges = vec![Vec::new(); edge_count];
    let mut tris = Vec::with_capacity(triangles);
    let mut tri_bounds = Vec::with_capacity(triangles);
    for t in 0..triangles {
        for e in 0..3 {
            let (a, b) = EDGES[e];
            edges[edge_of[t][e]] = vec![label[3 * t + a], label[3 * t + b]];
        }
        tris.push(vec![label[3 * t], label[3 * t + 1], label[3 * t + 2]]);
        // Deleting position 0, 1, 2 leaves edges (1,2), (0,2), (0,1).
        tri_bounds.push(vec![edge_of[t][1], edge_of[t][2], edge_of[t][0]]);
    }
    let edge_bounds = edges.iter().map(|e| vec![e[1], e[0]]).collect();
    let v = roots.len();
    DeltaComplex::new(
        v,
        vec![(0..v).map(|i| vec![i]).collect(), edges, tris],
        Some(vec![Vec::new(), edge_bounds, tri_bounds]),
    )
    .expect("glued surface is a valid Δ-complex")
}

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(-1000..=1000)), BigInt::from(rng.random_range(1..=97)))
}

/// Atoms at random points with random small integer weights.
pub fn random_atomic<R: Rng + ?Sized>(rng: &mut R, dim: usize, atoms: usize) -> AtomicMeasure {
    let atoms = (0..atoms)
        .map(|_| {
            let w = BigRational::from_integer(BigInt::from(rng.random_range(1..=9)));
            (UnitPoint::random(rng, dim), w)
        })
        .collect();
    AtomicMeasure::new(atoms).expect("positive weights")
}

/// Random rotation of R^3 from a random unit quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> ProjectiveMap {
    let q = UnitPoint::random(rng, 3).to_vec();
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    ProjectiveMap::from_rows(&[
        vec![1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        vec![2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        vec![2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])
    .expect("rotation is invertible")
}

/// Random matrix with entries in [-1, 1] plus a multiple of the identity,
/// which keeps it well conditioned.
pub fn random_map<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ProjectiveMap {
    let rows = (0..=dim)
        .map(|i| {
            (0..=dim)
                .map(|j| rng.random_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 })
                .collect()
        })
        .collect::<Vec<Vec<f64>>>();
    ProjectiveMap::from_rows(&rows).expect("diagonally dominant")
}
