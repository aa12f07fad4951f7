use super::ComplexError;
use crate::geom::CutSet;
use serde::Serialize;

/// A Δ-complex of dimension `n`.
///
/// `faces[r][i]` is the ordered vertex tuple of the `i`-th `r`-face (length
/// `r + 1`, repeats allowed); `boundaries[r][i][p]` is the index of the
/// `(r-1)`-face obtained by deleting position `p`, whose tuple must equal
/// `faces[r][i]` with entry `p` removed. Distinct faces may share a tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaComplex {
    dim: usize,
    faces: Vec<Vec<Vec<usize>>>,
    boundaries: Vec<Vec<Vec<usize>>>,
}

fn drop_position(tuple: &[usize], p: usize) -> Vec<usize> {
    tuple
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != p)
        .map(|(_, v)| *v)
        .collect()
}

impl DeltaComplex {
    /// Validates `faces` and `boundaries`. When `boundaries` is `None` each
    /// boundary is found by matching tuples, which must then be unique.
    pub fn new(
        vertex_count: usize,
        faces: Vec<Vec<Vec<usize>>>,
        boundaries: Option<Vec<Vec<Vec<usize>>>>,
    ) -> Result<Self, ComplexError> {
        let schema = |msg: String| ComplexError::Schema(msg);
        if faces.is_empty() {
            return Err(schema("no faces".into()));
        }
        let dim = faces.len() - 1;
        if faces[0].len() != vertex_count
            || faces[0].iter().enumerate().any(|(i, t)| t.as_slice() != [i])
        {
            return Err(schema(format!(
                "0-faces must be [[0], [1], …, [{}]]",
                vertex_count.saturating_sub(1)
            )));
        }
        for (r, list) in faces.iter().enumerate() {
            if list.is_empty() {
                return Err(schema(format!("no {r}-faces")));
            }
            for (i, t) in list.iter().enumerate() {
                if t.len() != r + 1 {
                    return Err(schema(format!("{r}-face {i} has {} vertices", t.len())));
                }
                if let Some(v) = t.iter().find(|v| **v >= vertex_count) {
                    return Err(schema(format!("{r}-face {i} names vertex {v}")));
                }
            }
        }
        let boundaries = match boundaries {
            Some(b) => {
                if b.len() != faces.len() || !b[0].is_empty() {
                    return Err(schema(
                        "boundaries need one (possibly empty) list per dimension, empty for 0".into(),
                    ));
                }
                b
            }
            None => derive_boundaries(&faces)?,
        };
        let complex = Self {
            dim,
            faces,
            boundaries,
        };
        complex.validate()?;
        Ok(complex)
    }

    fn validate(&self) -> Result<(), ComplexError> {
        let schema = |msg: String| ComplexError::Schema(msg);
        for r in 1..=self.dim {
            if self.boundaries[r].len() != self.faces[r].len() {
                return Err(schema(format!("boundaries of {r}-faces: wrong count")));
            }
            for (i, b) in self.boundaries[r].iter().enumerate() {
                if b.len() != r + 1 {
                    return Err(schema(format!("{r}-face {i}: expected {} boundary faces", r + 1)));
                }
                for (p, &j) in b.iter().enumerate() {
                    let Some(target) = self.faces[r - 1].get(j) else {
                        return Err(schema(format!("{r}-face {i}: boundary {p} names missing face {j}")));
                    };
                    if *target != drop_position(&self.faces[r][i], p) {
                        return Err(schema(format!(
                            "{r}-face {i} {:?}: boundary {p} is {}-face {j} {:?}",
                            self.faces[r][i],
                            r - 1,
                            target
                        )));
                    }
                }
                // d_p d_q = d_{q-1} d_p for p < q.
                if r >= 2 {
                    for q in 0..=r {
                        for p in 0..q {
                            let lhs = self.boundaries[r - 1][b[q]][p];
                            let rhs = self.boundaries[r - 1][b[p]][q - 1];
                            if lhs != rhs {
                                return Err(schema(format!(
                                    "{r}-face {i}: face identity fails for positions {p} < {q}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        for r in 0..self.dim {
            let mut used = vec![false; self.faces[r].len()];
            for b in &self.boundaries[r + 1] {
                for &j in b {
                    used[j] = true;
                }
            }
            if let Some(j) = used.iter().position(|u| !u) {
                return Err(schema(format!("{r}-face {j} bounds no {}-face", r + 1)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.faces[0].len()
    }

    pub fn faces(&self, r: usize) -> &[Vec<usize>] {
        &self.faces[r]
    }

    pub fn all_faces(&self) -> &[Vec<Vec<usize>>] {
        &self.faces
    }

    pub fn boundaries(&self) -> &[Vec<Vec<usize>>] {
        &self.boundaries
    }

    pub fn top_count(&self) -> usize {
        self.faces[self.dim].len()
    }

    pub fn face_counts(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    /// `Σ (-1)^r f_r`.
    pub fn euler(&self) -> i64 {
        self.faces
            .iter()
            .enumerate()
            .map(|(r, f)| if r % 2 == 0 { f.len() as i64 } else { -(f.len() as i64) })
            .sum()
    }

    /// The face of top simplex `top` obtained by deleting the positions in
    /// `cut`, as `(dimension, index)`.
    pub fn face_of(&self, top: usize, cut: CutSet) -> (usize, usize) {
        let mut r = self.dim;
        let mut f = top;
        let mut positions: Vec<usize> = cut.indices().collect();
        positions.sort_unstable_by(|a, b| b.cmp(a));
        for p in positions {
            f = self.boundaries[r][f][p];
            r -= 1;
        }
        (r, f)
    }

    /// Number of times each `(n-1)`-face occurs as a facet of a top simplex.
    pub fn facet_incidences(&self) -> Vec<usize> {
        let mut count = vec![0; self.faces[self.dim - 1].len()];
        for b in &self.boundaries[self.dim] {
            for &j in b {
                count[j] += 1;
            }
        }
        count
    }

    /// Errors unless every `(n-1)`-face bounds exactly two top simplices.
    pub fn check_closed_manifold(&self) -> Result<(), ComplexError> {
        if self.dim == 0 {
            return Err(ComplexError::Schema("dimension must be at least 1".into()));
        }
        let bad: Vec<(usize, usize)> = self
            .facet_incidences()
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 2)
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ComplexError::NotAManifold { faces: bad })
        }
    }
}

fn derive_boundaries(faces: &[Vec<Vec<usize>>]) -> Result<Vec<Vec<Vec<usize>>>, ComplexError> {
    let mut out = vec![Vec::new()];
    for r in 1..faces.len() {
        let mut level = Vec::with_capacity(faces[r].len());
        for (i, t) in faces[r].iter().enumerate() {
            let mut b = Vec::with_capacity(r + 1);
            for p in 0..=r {
                let want = drop_position(t, p);
                let mut hits = faces[r - 1]
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| **f == want)
                    .map(|(j, _)| j);
                let (Some(j), None) = (hits.next(), hits.next()) else {
                    return Err(ComplexError::Schema(format!(
                        "{r}-face {i}: boundary {want:?} is missing or ambiguous; give \"boundaries\""
                    )));
                };
                b.push(j);
            }
            level.push(b);
        }
        out.push(level);
    }
    Ok(out)
}
