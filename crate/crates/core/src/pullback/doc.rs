//! JSON input for circle pull-backs.
//!
//! ```json
//! {
//!   "degree": 3,
//!   "atoms": [{"turn": "0", "weight": "1"}],
//!   "coverings": [[{"start": "-1/28", "length": "3/14"}, …], …],
//!   "upstairs": [{"turn": "0", "weight": 1}, {"turn": "1/3", "weight": 1}, {"turn": "2/3", "weight": 1}]
//! }
//! ```
//!
//! Either `degree` (for `θ ↦ kθ`) or `nodes` (a piecewise linear lift as
//! `[x, y]` pairs) gives the map. Angles are in turns. Numbers may be JSON
//! numbers or exact `"p/q"` strings. Without `coverings`, a standard and a
//! seeded random covering are generated.

use super::{
    covering_independence, equivariance_check, pullback, quotient_round_trip, AdaptedCovering, Arc,
    CircleAtomicMeasure, CircleMap, EquivarianceReport, IndependenceReport, PullbackError, QuotientReport, Turn,
};
use crate::measure::Weight;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurnAtomDoc {
    pub turn: Weight,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDoc {
    pub start: Weight,
    pub length: Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<[Weight; 2]>>,
    pub atoms: Vec<TurnAtomDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coverings: Vec<Vec<ArcDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upstairs: Option<Vec<TurnAtomDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullbackReport {
    pub degree: i64,
    pub downstairs_total: String,
    pub pulled: Vec<(String, String)>,
    pub pulled_total: String,
    pub independence: Vec<IndependenceReport>,
    pub equivariance: Option<EquivarianceReport>,
    pub quotient: Option<QuotientReport>,
    pub pass: bool,
}

fn rational(w: &Weight) -> Result<Turn, PullbackError> {
    w.to_rational().map_err(|e| PullbackError::Parse(e.to_string()))
}

fn atoms(list: &[TurnAtomDoc]) -> Result<CircleAtomicMeasure, PullbackError> {
    CircleAtomicMeasure::new(
        list.iter()
            .map(|a| Ok((rational(&a.turn)?, rational(&a.weight)?)))
            .collect::<Result<_, PullbackError>>()?,
    )
}

impl PullbackDoc {
    pub fn from_json(text: &str) -> Result<Self, PullbackError> {
        serde_json::from_str(text).map_err(|e| PullbackError::Parse(e.to_string()))
    }

    pub fn map(&self) -> Result<CircleMap, PullbackError> {
        match (&self.degree, &self.nodes) {
            (Some(k), None) => CircleMap::power(*k),
            (None, Some(nodes)) => CircleMap::piecewise_linear(
                nodes
                    .iter()
                    .map(|[x, y]| Ok((rational(x)?, rational(y)?)))
                    .collect::<Result<_, PullbackError>>()?,
            ),
            _ => Err(PullbackError::Parse("give exactly one of \"degree\" and \"nodes\"".into())),
        }
    }

    /// Pulls back through every covering, compares them, and runs the deck
    /// checks for power maps.
    pub fn run(&self, seed: u64) -> Result<PullbackReport, PullbackError> {
        let f = self.map()?;
        let lambda = atoms(&self.atoms)?;
        let covers = if self.coverings.is_empty() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            vec![
                AdaptedCovering::standard(&f, &lambda),
                AdaptedCovering::random(&f, &lambda, &mut rng),
            ]
        } else {
            self.coverings
                .iter()
                .map(|arcs| {
                    AdaptedCovering::new(
                        arcs.iter()
                            .map(|a| Arc::new(rational(&a.start)?, rational(&a.length)?))
                            .collect::<Result<_, PullbackError>>()?,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        let pulled = pullback(&f, &lambda, &covers[0])?;
        let independence = covers[1..]
            .iter()
            .map(|c| covering_independence(&f, &lambda, &covers[0], c))
            .collect::<Result<Vec<_>, _>>()?;
        let power = matches!(f.kind(), super::MapKind::Power(_));
        let equivariance = if power {
            Some(equivariance_check(&f, &lambda, &covers[0])?)
        } else {
            None
        };
        let quotient = match &self.upstairs {
            Some(up) if power => {
                let up = atoms(up)?;
                let down = super::induce_quotient(&f, &up)?;
                Some(quotient_round_trip(&f, &up, &AdaptedCovering::standard(&f, &down))?)
            }
            Some(_) => return Err(PullbackError::NotAPowerMap),
            None => None,
        };
        let pass = independence.iter().all(|r| r.pass)
            && equivariance.as_ref().is_none_or(|r| r.pass)
            && quotient.as_ref().is_none_or(|r| r.pass);
        Ok(PullbackReport {
            degree: f.degree(),
            downstairs_total: lambda.total().to_string(),
            pulled_total: pulled.total().to_string(),
            pulled: pulled.atoms().iter().map(|(t, w)| (t.to_string(), w.to_string())).collect(),
            independence,
            equivariance,
            quotient,
            pass,
        })
    }
}
