//! Built-in manifold documents.
//!
//! Top simplices list their vertex labels in increasing order, so every face
//! tuple is sorted and faces of the same labels are told apart through
//! explicit boundaries.

use super::{ComplexError, ManifoldDoc, PairingDoc};
use crate::geom::{ProjectiveAction, ProjectiveMap, UnitPoint, MATCH_TOLERANCE};
use crate::measure::MeasureDoc;
use crate::symmetry::{antipode_index, icosahedron_faces, icosahedron_vertices, octahedron_vertices};
use std::collections::{BTreeMap, HashMap};

pub const BUILTIN_NAMES: [&str; 5] = [
    "s2-octahedron",
    "rp2-icosahedral",
    "t2-grid",
    "klein-grid",
    "s1-polygon",
];

/// Looks up a built-in document. `param` is the grid size `k` (default 4)
/// for the grids and the arc count `m` (default 4) for the polygon.
pub fn builtin_document(name: &str, param: Option<usize>) -> Result<ManifoldDoc, ComplexError> {
    match name {
        "s2-octahedron" => Ok(s2_octahedron()),
        "rp2-icosahedral" => Ok(rp2_icosahedral()),
        "t2-grid" => t2_grid(param.unwrap_or(4)),
        "klein-grid" => klein_grid(param.unwrap_or(4)),
        "s1-polygon" => s1_polygon(param.unwrap_or(4)),
        other => Err(ComplexError::Schema(format!(
            "unknown built-in {other:?}; expected one of {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

type EdgeKey = (u8, usize, usize);

/// One top simplex before sorting: vertex labels with developed positions,
/// and for surfaces the key of the edge joining each pair of local vertices.
struct Top {
    local: Vec<(usize, Vec<f64>)>,
    edges: Vec<((usize, usize), EdgeKey)>,
}

impl Top {
    fn edge_key(&self, a: usize, b: usize) -> EdgeKey {
        self.edges
            .iter()
            .find(|((x, y), _)| (*x == a && *y == b) || (*x == b && *y == a))
            .map(|(_, k)| *k)
            .expect("every edge of a built-in triangle is keyed")
    }
}

fn assemble(
    name: &str,
    dim: usize,
    vertex_count: usize,
    tops: Vec<Top>,
    holonomy: Vec<ProjectiveMap>,
    measure: MeasureDoc,
) -> Result<ManifoldDoc, ComplexError> {
    let mut top_tuples = Vec::with_capacity(tops.len());
    let mut developed = Vec::with_capacity(tops.len());
    let mut top_bounds = Vec::with_capacity(tops.len());
    let mut facet_tuples: Vec<Vec<usize>> = Vec::new();
    let mut facet_index: HashMap<EdgeKey, usize> = HashMap::new();
    for top in &tops {
        let mut order: Vec<usize> = (0..top.local.len()).collect();
        order.sort_by_key(|&i| top.local[i].0);
        let labels: Vec<usize> = order.iter().map(|&i| top.local[i].0).collect();
        developed.push(order.iter().map(|&i| top.local[i].1.clone()).collect::<Vec<_>>());
        let mut bounds = Vec::with_capacity(dim + 1);
        for p in 0..=dim {
            let rest: Vec<usize> = order.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, i)| *i).collect();
            let idx = if dim == 1 {
                top.local[rest[0]].0
            } else {
                let key = top.edge_key(rest[0], rest[1]);
                let tuple: Vec<usize> = rest.iter().map(|&i| top.local[i].0).collect();
                *facet_index.entry(key).or_insert_with(|| {
                    facet_tuples.push(tuple);
                    facet_tuples.len() - 1
                })
            };
            bounds.push(idx);
        }
        top_tuples.push(labels);
        top_bounds.push(bounds);
    }

    let mut faces = BTreeMap::new();
    let mut boundaries = BTreeMap::new();
    faces.insert(0, (0..vertex_count).map(|v| vec![v]).collect::<Vec<_>>());
    if dim == 2 {
        boundaries.insert(1, facet_tuples.iter().map(|e| vec![e[1], e[0]]).collect::<Vec<_>>());
        faces.insert(1, facet_tuples);
    }
    faces.insert(dim, top_tuples);
    boundaries.insert(dim, top_bounds.clone());

    let mut incidences: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (t, bounds) in top_bounds.iter().enumerate() {
        for (p, f) in bounds.iter().enumerate() {
            incidences.entry(*f).or_default().push((t, p));
        }
    }
    let mut candidates = vec![ProjectiveMap::identity(dim)];
    for g in &holonomy {
        candidates.push(g.clone());
        candidates.push(g.inverse());
    }
    let mut pairings = Vec::new();
    for (face, inc) in incidences {
        if inc.len() != 2 {
            return Err(ComplexError::Schema(format!(
                "built-in {name}: face {face} has {} incidences",
                inc.len()
            )));
        }
        let ((ta, pa), (tb, pb)) = (inc[0], inc[1]);
        let side = |t: usize, p: usize| -> Result<Vec<UnitPoint>, ComplexError> {
            developed[t]
                .iter()
                .enumerate()
                .filter(|(q, _)| *q != p)
                .map(|(_, row)| UnitPoint::new(row.clone()).map_err(ComplexError::from))
                .collect()
        };
        let (a, b) = (side(ta, pa)?, side(tb, pb)?);
        let map = candidates
            .iter()
            .find(|g| {
                [1.0, -1.0].iter().any(|sign| {
                    a.iter().zip(&b).all(|(x, y)| {
                        x.transformed(g)
                            .map(|gx| (gx.coords() - y.coords() * *sign).amax() <= MATCH_TOLERANCE)
                            .unwrap_or(false)
                    })
                })
            })
            .ok_or_else(|| {
                ComplexError::Schema(format!("built-in {name}: no holonomy element glues face {face}"))
            })?;
        pairings.push(PairingDoc {
            face,
            simplex_a: ta,
            simplex_b: tb,
            matrix: map.rows(),
        });
    }

    Ok(ManifoldDoc {
        name: Some(name.to_string()),
        dim,
        vertices: vertex_count,
        faces,
        boundaries: Some(boundaries),
        developed,
        holonomy_generators: holonomy.iter().map(ProjectiveMap::rows).collect(),
        pairings,
        measure: Some(measure),
    })
}

fn triangle(local: [(usize, Vec<f64>); 3], keys: [EdgeKey; 3]) -> Top {
    Top {
        local: local.to_vec(),
        edges: vec![((0, 1), keys[0]), ((1, 2), keys[1]), ((0, 2), keys[2])],
    }
}

/// The octahedron, each face developed onto its coordinate octant. Labels
/// follow `±e1, ±e2, ±e3`; the holonomy is trivial.
pub fn s2_octahedron() -> ManifoldDoc {
    let v = octahedron_vertices();
    let mut tops = Vec::new();
    for a in 0..2 {
        for b in 2..4 {
            for c in 4..6 {
                let key = |x: usize, y: usize| (0u8, x.min(y), x.max(y));
                tops.push(triangle(
                    [(a, v[a].to_vec()), (b, v[b].to_vec()), (c, v[c].to_vec())],
                    [key(a, b), key(b, c), key(a, c)],
                ));
            }
        }
    }
    assemble(
        "s2-octahedron",
        2,
        6,
        tops,
        Vec::new(),
        MeasureDoc::Round {
            dim: 2,
            monte_carlo: false,
        },
    )
    .expect("octahedron assembles")
}

/// The antipodal quotient of the icosahedron: one face from each antipodal
/// pair, with vertices labelled by antipodal class. Holonomy `{±I}`.
pub fn rp2_icosahedral() -> ManifoldDoc {
    let v = icosahedron_vertices();
    let mut class = vec![usize::MAX; v.len()];
    let mut next = 0;
    for i in 0..v.len() {
        if class[i] == usize::MAX {
            class[i] = next;
            class[antipode_index(&v, i).expect("icosahedron is antipodal")] = next;
            next += 1;
        }
    }
    let probe = [1.0, 0.1, 0.01];
    let tops = icosahedron_faces()
        .into_iter()
        .filter(|f| {
            let c: f64 = (0..3)
                .map(|j| f.iter().map(|&i| v[i].coords()[j]).sum::<f64>() * probe[j])
                .sum();
            c > 0.0
        })
        .map(|f| {
            let key = |x: usize, y: usize| {
                let (a, b) = (class[f[x]], class[f[y]]);
                (0u8, a.min(b), a.max(b))
            };
            triangle(
                [
                    (class[f[0]], v[f[0]].to_vec()),
                    (class[f[1]], v[f[1]].to_vec()),
                    (class[f[2]], v[f[2]].to_vec()),
                ],
                [key(0, 1), key(1, 2), key(0, 2)],
            )
        })
        .collect();
    assemble(
        "rp2-icosahedral",
        2,
        6,
        tops,
        vec![ProjectiveMap::antipodal(2)],
        MeasureDoc::Round {
            dim: 2,
            monte_carlo: false,
        },
    )
    .expect("icosahedral quotient assembles")
}

fn affine(rows: [[f64; 3]; 3]) -> ProjectiveMap {
    ProjectiveMap::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .expect("invertible affine map")
}

/// `k × k` square grid in the affine chart `x3 = 1`, each square split along
/// its diagonal. `label` identifies grid points and `edge` canonicalizes
/// edges `(kind, i, j)` with kinds 0 = horizontal, 1 = vertical, 2 = diagonal.
fn grid(
    name: &str,
    k: usize,
    holonomy: Vec<ProjectiveMap>,
    label: impl Fn(usize, usize) -> usize,
    edge: impl Fn(u8, usize, usize) -> EdgeKey,
) -> Result<ManifoldDoc, ComplexError> {
    if k < 2 {
        return Err(ComplexError::Schema(format!("{name} needs k >= 2, got {k}")));
    }
    let pt = |i: usize, j: usize| (label(i, j), vec![i as f64, j as f64, 1.0]);
    let mut tops = Vec::with_capacity(2 * k * k);
    for j in 0..k {
        for i in 0..k {
            tops.push(triangle(
                [pt(i, j), pt(i + 1, j), pt(i + 1, j + 1)],
                [edge(0, i, j), edge(1, i + 1, j), edge(2, i, j)],
            ));
            tops.push(triangle(
                [pt(i, j), pt(i, j + 1), pt(i + 1, j + 1)],
                [edge(1, i, j), edge(0, i, j + 1), edge(2, i, j)],
            ));
        }
    }
    let measure = MeasureDoc::Subsphere {
        dim: 2,
        basis: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
        monte_carlo: false,
    };
    assemble(name, 2, k * k, tops, holonomy, measure)
}

/// Torus from a `k × k` grid with translation holonomy `(x, y) ↦ (x + k, y)`
/// and `(x, y) ↦ (x, y + k)`.
pub fn t2_grid(k: usize) -> Result<ManifoldDoc, ComplexError> {
    let kf = k as f64;
    let holonomy = vec![
        affine([[1.0, 0.0, kf], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        affine([[1.0, 0.0, 0.0], [0.0, 1.0, kf], [0.0, 0.0, 1.0]]),
    ];
    let label = move |i: usize, j: usize| (i % k.max(1)) + k * (j % k.max(1));
    let edge = move |kind: u8, i: usize, j: usize| match kind {
        0 => (0, i, j % k),
        1 => (1, i % k, j),
        _ => (2, i, j),
    };
    grid("t2-grid", k, holonomy, label, edge)
}

/// Klein bottle from a `k × k` grid: the sides are glued by `(x, y) ↦ (x + k, y)`
/// and the bottom onto the top by the glide `(x, y) ↦ (k − x, y + k)`.
pub fn klein_grid(k: usize) -> Result<ManifoldDoc, ComplexError> {
    let kf = k as f64;
    let holonomy = vec![
        affine([[1.0, 0.0, kf], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        affine([[-1.0, 0.0, kf], [0.0, 1.0, kf], [0.0, 0.0, 1.0]]),
    ];
    let m = k.max(1);
    let label = move |i: usize, j: usize| {
        if j == k {
            (k - i) % m
        } else {
            i % m + k * j
        }
    };
    let edge = move |kind: u8, i: usize, j: usize| match kind {
        0 if j == k => (0, k - i - 1, 0),
        0 => (0, i, j),
        1 => (1, i % m, j),
        _ => (2, i, j),
    };
    grid("klein-grid", k, holonomy, label, edge)
}

/// `RP¹` as `m` arcs of the upper half circle, the last one closing up
/// through the antipodal map.
pub fn s1_polygon(m: usize) -> Result<ManifoldDoc, ComplexError> {
    if m < 2 {
        return Err(ComplexError::Schema(format!("s1-polygon needs m >= 2, got {m}")));
    }
    let at = |j: usize| {
        let t = std::f64::consts::PI * j as f64 / m as f64;
        vec![t.cos(), t.sin()]
    };
    let tops = (0..m)
        .map(|j| Top {
            local: vec![(j, at(j)), ((j + 1) % m, at(j + 1))],
            edges: Vec::new(),
        })
        .collect();
    assemble(
        "s1-polygon",
        1,
        m,
        tops,
        vec![ProjectiveMap::antipodal(1)],
        MeasureDoc::Round {
            dim: 1,
            monte_carlo: false,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_euler_characteristics() {
        let cases = [
            (s2_octahedron(), vec![6, 12, 8], 2),
            (rp2_icosahedral(), vec![6, 15, 10], 1),
            (t2_grid(3).unwrap(), vec![9, 27, 18], 0),
            (klein_grid(3).unwrap(), vec![9, 27, 18], 0),
            (s1_polygon(5).unwrap(), vec![5, 5], 0),
        ];
        for (doc, counts, chi) in cases {
            let k = doc.load().unwrap();
            assert_eq!(k.complex().face_counts(), counts, "{:?}", doc.name);
            assert_eq!(k.euler(), chi);
        }
    }

    #[test]
    fn smallest_grids_need_explicit_boundaries_and_load() {
        for doc in [t2_grid(2).unwrap(), klein_grid(2).unwrap(), s1_polygon(2).unwrap()] {
            let k = doc.load().unwrap();
            assert_eq!(k.euler(), 0);
            let json = doc.to_json();
            assert_eq!(ManifoldDoc::from_json(&json).unwrap(), doc);
        }
    }

    #[test]
    fn torus_example_has_32_triangles() {
        let doc = builtin_document("t2-grid", Some(4)).unwrap();
        assert_eq!(doc.faces[&2].len(), 32);
        assert!(builtin_document("h2-surface", None).is_err());
        assert!(t2_grid(1).is_err());
    }

    #[test]
    fn klein_gluing_uses_the_glide() {
        let k = klein_grid(3).unwrap().load().unwrap();
        let glide = &k.holonomy()[1];
        let glued = k
            .pairings()
            .iter()
            .filter(|p| p.map.projectively_eq(glide, 1e-12))
            .count();
        assert_eq!(glued, 3);
    }
}
