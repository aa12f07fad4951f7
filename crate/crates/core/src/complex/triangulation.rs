use super::{ComplexError, DeltaComplex, PairingMismatch};
use crate::geom::{ProjectiveAction, ProjectiveMap, SphericalSimplex, UnitPoint, MATCH_TOLERANCE};
use crate::measure::{MeasureError, MeasureSpec};

/// A gluing of the developed facet `face` of `simplex_a` onto the same facet
/// of `simplex_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    pub face: usize,
    pub simplex_a: usize,
    pub simplex_b: usize,
    pub map: ProjectiveMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricTriangulation {
    name: Option<String>,
    complex: DeltaComplex,
    developed: Vec<SphericalSimplex>,
    holonomy: Vec<ProjectiveMap>,
    pairings: Vec<Pairing>,
    measure: Option<MeasureSpec>,
}

impl GeometricTriangulation {
    pub fn new(
        name: Option<String>,
        complex: DeltaComplex,
        developed: Vec<Vec<Vec<f64>>>,
        holonomy: Vec<ProjectiveMap>,
        pairings: Vec<Pairing>,
        measure: Option<MeasureSpec>,
    ) -> Result<Self, ComplexError> {
        let n = complex.dim();
        complex.check_closed_manifold()?;
        if developed.len() != complex.top_count() {
            return Err(ComplexError::Schema(format!(
                "{} developed simplices for {} top simplices",
                developed.len(),
                complex.top_count()
            )));
        }
        let developed = developed
            .iter()
            .enumerate()
            .map(|(t, rows)| {
                SphericalSimplex::from_vertices(rows)
                    .and_then(|s| {
                        if s.dim() == n {
                            Ok(s)
                        } else {
                            Err(crate::geom::GeomError::DimensionMismatch {
                                expected: n + 1,
                                found: s.dim() + 1,
                            })
                        }
                    })
                    .map_err(|source| ComplexError::DegenerateSimplex { simplex: t, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (i, g) in holonomy.iter().enumerate() {
            if g.ambient_dim() != n {
                return Err(ComplexError::Schema(format!(
                    "holonomy generator {i} acts on S^{}, manifold has dimension {n}",
                    g.ambient_dim()
                )));
            }
        }
        if let Some(m) = &measure {
            if m.dim() != n {
                return Err(ComplexError::DimensionMismatch {
                    manifold: n,
                    measure: m.dim(),
                });
            }
        }
        let k = Self {
            name,
            complex,
            developed,
            holonomy,
            pairings,
            measure,
        };
        k.check_pairings()?;
        Ok(k)
    }

    /// Positions at which `face` is a facet of `a` and of `b`.
    pub fn pairing_positions(&self, p: &Pairing) -> Result<(usize, usize), ComplexError> {
        let n = self.complex.dim();
        let tops = self.complex.top_count();
        if p.simplex_a >= tops || p.simplex_b >= tops {
            return Err(ComplexError::Schema(format!(
                "pairing of face {} names a missing simplex",
                p.face
            )));
        }
        let slots = |t: usize| -> Vec<usize> {
            self.complex.boundaries()[n][t]
                .iter()
                .enumerate()
                .filter(|(_, f)| **f == p.face)
                .map(|(i, _)| i)
                .collect()
        };
        let sa = slots(p.simplex_a);
        let sb = slots(p.simplex_b);
        let missing = || {
            ComplexError::Schema(format!(
                "face {} is not a facet of both simplices {} and {}",
                p.face, p.simplex_a, p.simplex_b
            ))
        };
        if p.simplex_a == p.simplex_b {
            if sa.len() < 2 {
                return Err(missing());
            }
            return Ok((sa[0], sa[1]));
        }
        match (sa.first(), sb.first()) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(missing()),
        }
    }

    fn check_pairings(&self) -> Result<(), ComplexError> {
        let n = self.complex.dim();
        let mut mismatches = Vec::new();
        for (i, p) in self.pairings.iter().enumerate() {
            if p.map.ambient_dim() != n {
                return Err(ComplexError::Schema(format!("pairing {i} has the wrong dimension")));
            }
            let (pa, pb) = self.pairing_positions(p)?;
            let va = &self.developed[p.simplex_a].vertices();
            let vb = &self.developed[p.simplex_b].vertices();
            let image: Vec<UnitPoint> = (0..=n)
                .filter(|j| *j != pa)
                .map(|j| va[j].transformed(&p.map))
                .collect::<Result<_, _>>()?;
            let target: Vec<&UnitPoint> = (0..=n).filter(|j| *j != pb).map(|j| &vb[j]).collect();
            let deviation = |sign: f64| {
                image
                    .iter()
                    .zip(&target)
                    .map(|(x, y)| (x.coords() - y.coords() * sign).amax())
                    .fold(0.0, f64::max)
            };
            let dev = deviation(1.0).min(deviation(-1.0));
            if dev > MATCH_TOLERANCE {
                mismatches.push(PairingMismatch {
                    pairing: i,
                    face: p.face,
                    simplex_a: p.simplex_a,
                    simplex_b: p.simplex_b,
                    deviation: dev,
                });
            }
        }
        if mismatches.is_empty() {
            Ok(())
        } else {
            Err(ComplexError::DevelopingMismatch { mismatches })
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn complex(&self) -> &DeltaComplex {
        &self.complex
    }

    pub fn developed(&self) -> &[SphericalSimplex] {
        &self.developed
    }

    pub fn holonomy(&self) -> &[ProjectiveMap] {
        &self.holonomy
    }

    pub fn pairings(&self) -> &[Pairing] {
        &self.pairings
    }

    /// The measure shipped with the document, if any.
    pub fn measure(&self) -> Option<&MeasureSpec> {
        self.measure.as_ref()
    }

    pub fn euler(&self) -> i64 {
        self.complex.euler()
    }

    pub(crate) fn check_measure(&self, m: &MeasureSpec) -> Result<(), ComplexError> {
        if m.dim() != self.dim() {
            return Err(ComplexError::DimensionMismatch {
                manifold: self.dim(),
                measure: m.dim(),
            });
        }
        Ok(())
    }

    /// Attaches the top simplex and, when the offending plane is one of its
    /// facets, the facet index to a boundary-atom error.
    pub(crate) fn locate(&self, simplex: usize, err: MeasureError) -> ComplexError {
        match err {
            MeasureError::BoundaryAtom { atom, normal } => {
                let s = &self.developed[simplex];
                let facet = s
                    .planes()
                    .iter()
                    .position(|h| {
                        h.normal()
                            .iter()
                            .zip(&normal)
                            .all(|(a, b)| (a - b).abs() <= 1e-12)
                    })
                    .map(|i| self.complex.boundaries()[self.dim()][simplex][i]);
                ComplexError::BoundaryAtom {
                    simplex,
                    facet,
                    atom,
                    normal,
                }
            }
            other => other.into(),
        }
    }
}
