//! JSON form of a measure.
//!
//! ```json
//! {"type": "round", "dim": 2}
//! {"type": "round", "dim": 4, "monte_carlo": true}
//! {"type": "atomic", "atoms": [{"point": [0, 0, 1], "weight": "1/3"},
//!                              {"point": [1, 2, 0], "weight": 0.5}]}
//! {"type": "subsphere", "dim": 2, "basis": [[1, 0, 0], [0, 1, 0]]}
//! {"type": "mixture", "components": [{"weight": 0.5, "measure": {...}}, ...]}
//! {"type": "restricted", "base": {...}, "region": [[1, 0, 0]]}
//! {"type": "restricted", "base": {...}, "subspace": [[1, 0, 0], [0, 1, 0]]}
//! {"type": "orbit", "seed": [1, 0, 0.5], "generators": [[[..row..], ...]], "max_orbit": 100}
//! ```
//!
//! Atom weights are positive and rescaled to sum to 1; a string weight
//! `"p/q"` is read as an exact rational. `region` lists inward normals.

use super::{
    finite_orbit_measure, restrict_to_subspace, AtomicMeasure, MeasureError, MeasureSpec, Mixture,
    RestrictedNormalized, RoundMeasure, SubsphereUniform,
};
use crate::geom::{ProjectiveMap, Region, UnitPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Number(f64),
    Exact(String),
}

impl Weight {
    pub fn to_rational(&self) -> Result<BigRational, MeasureError> {
        match self {
            Weight::Number(w) => super::atomic::rational_from_f64(*w),
            Weight::Exact(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, MeasureError> {
    let bad = || MeasureError::InvalidWeights(format!("cannot parse weight {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub point: Vec<f64>,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub weight: f64,
    pub measure: MeasureDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureDoc {
    Round {
        dim: usize,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        monte_carlo: bool,
    },
    Atomic {
        atoms: Vec<AtomDoc>,
    },
    Subsphere {
        dim: usize,
        basis: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        monte_carlo: bool,
    },
    Mixture {
        components: Vec<ComponentDoc>,
    },
    Restricted {
        base: Box<MeasureDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subspace: Option<Vec<Vec<f64>>>,
    },
    Orbit {
        seed: Vec<f64>,
        generators: Vec<Vec<Vec<f64>>>,
        max_orbit: usize,
    },
}

impl MeasureDoc {
    pub fn to_spec(&self) -> Result<MeasureSpec, MeasureError> {
        Ok(match self {
            MeasureDoc::Round { dim, monte_carlo } => {
                if *monte_carlo {
                    RoundMeasure::monte_carlo(*dim).into()
                } else {
                    RoundMeasure::new(*dim).into()
                }
            }
            MeasureDoc::Atomic { atoms } => {
                let atoms = atoms
                    .iter()
                    .map(|a| Ok((UnitPoint::new(a.point.clone())?, a.weight.to_rational()?)))
                    .collect::<Result<Vec<_>, MeasureError>>()?;
                AtomicMeasure::new(atoms)?.into()
            }
            MeasureDoc::Subsphere {
                dim,
                basis,
                monte_carlo,
            } => SubsphereUniform::new(*dim, basis)?
                .with_monte_carlo(*monte_carlo)
                .into(),
            MeasureDoc::Mixture { components } => {
                let parts = components
                    .iter()
                    .map(|c| Ok((c.weight, c.measure.to_spec()?)))
                    .collect::<Result<Vec<_>, MeasureError>>()?;
                Mixture::new(parts)?.into()
            }
            MeasureDoc::Restricted {
                base,
                region,
                subspace,
            } => {
                let base = base.to_spec()?;
                match (region, subspace) {
                    (Some(normals), None) => {
                        let r = Region::from_normals(base.dim(), normals)?;
                        RestrictedNormalized::new(base, r)?.into()
                    }
                    (None, Some(span)) => restrict_to_subspace(&base, span)?,
                    _ => {
                        return Err(MeasureError::InvalidArgument(
                            "restricted measure needs exactly one of region, subspace".into(),
                        ))
                    }
                }
            }
            MeasureDoc::Orbit {
                seed,
                generators,
                max_orbit,
            } => {
                let gens = generators
                    .iter()
                    .map(|rows| ProjectiveMap::from_rows(rows))
                    .collect::<Result<Vec<_>, _>>()?;
                finite_orbit_measure(&UnitPoint::new(seed.clone())?, &gens, *max_orbit)?.into()
            }
        })
    }

    pub fn from_spec(spec: &MeasureSpec) -> Self {
        match spec {
            MeasureSpec::Round(m) => MeasureDoc::Round {
                dim: m.dim(),
                monte_carlo: m.is_monte_carlo(),
            },
            MeasureSpec::Atomic(m) => atomic_doc(m),
            MeasureSpec::Subsphere(m) => MeasureDoc::Subsphere {
                dim: m.dim(),
                basis: m.spanning_vectors(),
                monte_carlo: m.is_monte_carlo(),
            },
            MeasureSpec::Mixture(m) => MeasureDoc::Mixture {
                components: m
                    .components()
                    .iter()
                    .map(|(w, c)| ComponentDoc {
                        weight: *w,
                        measure: MeasureDoc::from_spec(c),
                    })
                    .collect(),
            },
            MeasureSpec::Restricted(m) => MeasureDoc::Restricted {
                base: Box::new(MeasureDoc::from_spec(m.base())),
                region: Some(
                    m.domain()
                        .halves()
                        .iter()
                        .map(|h| h.normal().iter().copied().collect())
                        .collect(),
                ),
                subspace: None,
            },
            MeasureSpec::Orbit(m) => MeasureDoc::Orbit {
                seed: m.seed().to_vec(),
                generators: m.generators().iter().map(|g| g.rows()).collect(),
                max_orbit: m.max_orbit(),
            },
        }
    }
}

fn atomic_doc(m: &AtomicMeasure) -> MeasureDoc {
    MeasureDoc::Atomic {
        atoms: m
            .atoms()
            .iter()
            .map(|a| AtomDoc {
                point: a.point.to_vec(),
                weight: Weight::Exact(a.weight.to_string()),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let text = r#"{"type": "mixture", "components": [
            {"weight": 0.5, "measure": {"type": "round", "dim": 2}},
            {"weight": 0.25, "measure": {"type": "atomic", "atoms": [
                {"point": [0, 0, 1], "weight": "1/3"}, {"point": [1, 2, 0.5], "weight": 2}]}},
            {"weight": 0.125, "measure": {"type": "subsphere", "dim": 2, "basis": [[1, 0, 0], [0, 1, 0]]}},
            {"weight": 0.0625, "measure": {"type": "restricted",
                "base": {"type": "round", "dim": 2}, "region": [[1, 0, 0], [0, 1, 0]]}},
            {"weight": 0.0625, "measure": {"type": "orbit", "seed": [1, 0, 0.5],
                "generators": [[[0, -1, 0], [1, 0, 0], [0, 0, 1]]], "max_orbit": 10}}
        ]}"#;
        let doc: MeasureDoc = serde_json::from_str(text).unwrap();
        let spec = doc.to_spec().unwrap();
        assert_eq!(spec.kind(), "mixture");
        assert_eq!(spec.dim(), 2);
        let MeasureSpec::Mixture(m) = &spec else { unreachable!() };
        let atoms = m.components()[1].1.as_atomic().unwrap();
        assert_eq!(atoms.atoms()[0].weight.to_string(), "1/7");
        // Quarter turn about e3: the orbit of (1, 0, 0.5) has 4 projective points.
        assert_eq!(m.components()[4].1.as_atomic().unwrap().len(), 4);
    }

    #[test]
    fn exact_weights_survive_serialization() {
        let a = AtomicMeasure::uniform(vec![
            UnitPoint::basis(2, 0),
            UnitPoint::basis(2, 1),
            UnitPoint::basis(2, 2),
        ])
        .unwrap();
        let doc = MeasureDoc::from_spec(&a.clone().into());
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"1/3\""));
        let back: MeasureDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_spec().unwrap(), MeasureSpec::Atomic(a));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(serde_json::from_str::<MeasureDoc>(r#"{"type": "cone"}"#).is_err());
        let bad_weight = r#"{"type": "atomic", "atoms": [{"point": [1, 0], "weight": "x/2"}]}"#;
        let doc: MeasureDoc = serde_json::from_str(bad_weight).unwrap();
        assert!(doc.to_spec().is_err());
        let both = r#"{"type": "restricted", "base": {"type": "round", "dim": 1}}"#;
        let doc: MeasureDoc = serde_json::from_str(both).unwrap();
        assert!(doc.to_spec().is_err());
    }
}
