//! JSON manifold documents.
//!
//! ```json
//! {
//!   "name": "s2-octahedron",
//!   "dim": 2,
//!   "vertices": 6,
//!   "faces": {"0": [[0], [1], …], "1": [[0, 2], …], "2": [[0, 2, 4], …]},
//!   "boundaries": {"1": [[2, 0], …], "2": [[9, 5, 0], …]},
//!   "developed": [[[1, 0, 0], [0, 1, 0], [0, 0, 1]], …],
//!   "holonomy_generators": [[[1, 0, 0], [0, 1, 0], [0, 0, 1]]],
//!   "pairings": [{"face": 0, "simplex_a": 0, "simplex_b": 1, "matrix": [[…], …]}],
//!   "measure": {"type": "round", "dim": 2}
//! }
//! ```
//!
//! `faces[r]` lists ordered vertex tuples. `boundaries[r][i][p]` is the index
//! of the `(r-1)`-face obtained by deleting position `p` of `faces[r][i]`; it
//! may be omitted when every such tuple occurs exactly once. `developed[t]`
//! lists the sphere coordinates of the vertices of top simplex `t`, in tuple
//! order. Matrices are row-major. `boundaries`, `holonomy_generators`,
//! `pairings` and `measure` are optional.

use super::{ComplexError, DeltaComplex, GeometricTriangulation, Pairing};
use crate::geom::ProjectiveMap;
use crate::measure::MeasureDoc;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingDoc {
    pub face: usize,
    pub simplex_a: usize,
    pub simplex_b: usize,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub vertices: usize,
    pub faces: BTreeMap<usize, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<BTreeMap<usize, Vec<Vec<usize>>>>,
    pub developed: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holonomy_generators: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairings: Vec<PairingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureDoc>,
}

impl ManifoldDoc {
    pub fn from_json(text: &str) -> Result<Self, ComplexError> {
        serde_json::from_str(text).map_err(|e| ComplexError::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Validates the document into a triangulation.
    pub fn load(&self) -> Result<GeometricTriangulation, ComplexError> {
        let levels = |m: &BTreeMap<usize, Vec<Vec<usize>>>, what: &str, first: usize| {
            (first..=self.dim)
                .map(|r| {
                    m.get(&r).cloned().ok_or_else(|| {
                        ComplexError::Schema(format!("{what} for dimension {r} missing"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        if let Some(r) = self.faces.keys().find(|r| **r > self.dim) {
            return Err(ComplexError::Schema(format!("faces of dimension {r} > {}", self.dim)));
        }
        let faces = levels(&self.faces, "faces", 0)?;
        let boundaries = match &self.boundaries {
            Some(b) => {
                let mut all = vec![Vec::new()];
                all.extend(levels(b, "boundaries", 1)?);
                Some(all)
            }
            None => None,
        };
        let complex = DeltaComplex::new(self.vertices, faces, boundaries)?;
        let holonomy = self
            .holonomy_generators
            .iter()
            .map(|m| ProjectiveMap::from_rows(m))
            .collect::<Result<Vec<_>, _>>()?;
        let pairings = self
            .pairings
            .iter()
            .map(|p| {
                Ok(Pairing {
                    face: p.face,
                    simplex_a: p.simplex_a,
                    simplex_b: p.simplex_b,
                    map: ProjectiveMap::from_rows(&p.matrix)?,
                })
            })
            .collect::<Result<Vec<_>, ComplexError>>()?;
        let measure = match &self.measure {
            Some(m) => Some(m.to_spec()?),
            None => None,
        };
        GeometricTriangulation::new(
            self.name.clone(),
            complex,
            self.developed.clone(),
            holonomy,
            pairings,
            measure,
        )
    }
}
