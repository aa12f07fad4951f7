//! Regular polyhedra on `S^2` and their finite rotation groups.

use crate::geom::{GeomError, ProjectiveMap, UnitPoint, MATCH_TOLERANCE};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("group generated by the maps exceeds {limit} elements")]
    TooLarge { limit: usize },
    #[error("no generators given")]
    NoGenerators,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// The 12 vertices `(0, ±1, ±φ)` and cyclic permutations, normalized.
/// Index `2k` and `2k + 1` are never antipodal to each other; the antipode
/// of vertex `i` is found by [`antipode_index`].
pub fn icosahedron_vertices() -> Vec<UnitPoint> {
    let phi = golden_ratio();
    let mut out = Vec::with_capacity(12);
    for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
        out.push(UnitPoint::new(vec![0.0, a, b]).unwrap());
    }
    for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
        out.push(UnitPoint::new(vec![a, b, 0.0]).unwrap());
    }
    for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
        out.push(UnitPoint::new(vec![b, 0.0, a]).unwrap());
    }
    out
}

pub fn antipode_index(points: &[UnitPoint], i: usize) -> Option<usize> {
    let target = points[i].antipode();
    points
        .iter()
        .position(|p| p.approx_eq(&target, MATCH_TOLERANCE))
}

/// The 20 faces as vertex-index triples into [`icosahedron_vertices`],
/// each triple sorted ascending.
pub fn icosahedron_faces() -> Vec<[usize; 3]> {
    let v = icosahedron_vertices();
    // Neighbours subtend the largest dot product among distinct non-antipodal pairs.
    let edge_dot = 1.0 / 5f64.sqrt();
    let adjacent = |i: usize, j: usize| (v[i].dot(&v[j]) - edge_dot).abs() < 1e-9;
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if adjacent(i, j) && adjacent(j, k) && adjacent(i, k) {
                    faces.push([i, j, k]);
                }
            }
        }
    }
    faces
}

/// The octahedron `±e_i` in the order `+e1, -e1, +e2, -e2, +e3, -e3`.
pub fn octahedron_vertices() -> Vec<UnitPoint> {
    (0..3)
        .flat_map(|i| {
            let p = UnitPoint::basis(2, i);
            [p.clone(), p.antipode()]
        })
        .collect()
}

/// Closure of `generators` under composition, as a list of distinct
/// projective maps starting with the identity.
pub fn generate_group(
    generators: &[ProjectiveMap],
    limit: usize,
) -> Result<Vec<ProjectiveMap>, GroupError> {
    let first = generators.first().ok_or(GroupError::NoGenerators)?;
    let identity = ProjectiveMap::identity(first.ambient_dim());
    let mut elements = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = s.compose(&g);
            if !elements
                .iter()
                .any(|e| e.projectively_eq(&h, MATCH_TOLERANCE))
            {
                if elements.len() == limit {
                    return Err(GroupError::TooLarge { limit });
                }
                elements.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(elements)
}

/// Rotation by `2π/5` about the axis through icosahedron vertex 0.
pub fn icosahedral_five_fold() -> ProjectiveMap {
    let a = icosahedron_vertices()[0].to_vec();
    ProjectiveMap::rotation([a[0], a[1], a[2]], 2.0 * std::f64::consts::PI / 5.0).unwrap()
}

/// The 60 rotations of the icosahedron.
pub fn icosahedral_group() -> Vec<ProjectiveMap> {
    let v = icosahedron_vertices();
    let f = icosahedron_faces()[0];
    let c: Vec<f64> = (0..3)
        .map(|i| v[f[0]].coords()[i] + v[f[1]].coords()[i] + v[f[2]].coords()[i])
        .collect();
    let three = ProjectiveMap::rotation([c[0], c[1], c[2]], 2.0 * std::f64::consts::PI / 3.0).unwrap();
    generate_group(&[icosahedral_five_fold(), three], 60).expect("icosahedral group has order 60")
}

/// The 24 rotations of the cube.
pub fn octahedral_group() -> Vec<ProjectiveMap> {
    let quarter = std::f64::consts::FRAC_PI_2;
    let a = ProjectiveMap::rotation([0.0, 0.0, 1.0], quarter).unwrap();
    let b = ProjectiveMap::rotation([1.0, 0.0, 0.0], quarter).unwrap();
    generate_group(&[a, b], 24).expect("octahedral group has order 24")
}

/// `{I, diag(-1,-1,1), diag(1,-1,-1), diag(-1,1,-1)}`.
pub fn klein_four_group() -> Vec<ProjectiveMap> {
    let d = |a: f64, b: f64, c: f64| {
        ProjectiveMap::from_rows(&[vec![a, 0.0, 0.0], vec![0.0, b, 0.0], vec![0.0, 0.0, c]]).unwrap()
    };
    generate_group(&[d(-1.0, -1.0, 1.0), d(1.0, -1.0, -1.0)], 4).expect("Klein four-group")
}
