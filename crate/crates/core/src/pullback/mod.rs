//! Pull-backs of atomic measures under circle local homeomorphisms, built
//! through adapted coverings, and measures induced on the quotient of a
//! regular covering `θ ↦ kθ`.
//!
//! Angles are exact rationals in turns (`1` turn is `2π`).
//!
//! Only atomic measures are handled. The pull-back is unique among countably
//! additive measures; finitely additive set functions are not modelled.

mod doc;
mod map;

pub use doc::{ArcDoc, PullbackDoc, PullbackReport, TurnAtomDoc};
pub use map::{frac, CircleMap, MapKind};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub type Turn = BigRational;

pub(crate) fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// `p / q` turns.
pub fn turn(p: i64, q: i64) -> Turn {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PullbackError {
    #[error("a circle local homeomorphism needs nonzero degree")]
    ZeroDegree,
    #[error("lift is not strictly monotone: {0}")]
    NotMonotone(String),
    #[error("arcs do not cover the circle: {point} turns is missed")]
    NotACovering { point: String },
    #[error("arc {arc} is not mapped injectively: its image spans {image} turns")]
    NotAdapted { arc: usize, image: String },
    #[error("preimage {preimage} of the atom at {atom} lies on an endpoint of arc {arc}; perturb the covering")]
    AtomOnBoundary {
        atom: String,
        preimage: String,
        arc: usize,
    },
    #[error("measure is not invariant under the deck rotation: atom at {turn} has no image")]
    NotDeckInvariant { turn: String },
    #[error("the operation needs a power map")]
    NotAPowerMap,
    #[error("invalid circle measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Finitely many atoms at distinct angles with positive weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleAtomicMeasure {
    atoms: Vec<(Turn, BigRational)>,
}

impl CircleAtomicMeasure {
    /// Reduces angles mod 1 and sorts them. Repeated angles are rejected.
    pub fn new(atoms: Vec<(Turn, BigRational)>) -> Result<Self, PullbackError> {
        let mut atoms: Vec<(Turn, BigRational)> = atoms.into_iter().map(|(t, w)| (frac(&t), w)).collect();
        if let Some((_, w)) = atoms.iter().find(|(_, w)| !w.is_positive()) {
            return Err(PullbackError::InvalidMeasure(format!("weight {w} is not positive")));
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = atoms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(PullbackError::InvalidMeasure(format!("two atoms at {}", w[0].0)));
        }
        Ok(Self { atoms })
    }

    pub fn dirac(t: Turn) -> Self {
        Self::new(vec![(t, BigRational::one())]).expect("one atom")
    }

    pub fn atoms(&self) -> &[(Turn, BigRational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.atoms.iter().map(|(_, w)| w.clone()).sum()
    }

    /// Image under the rotation by `r` turns.
    pub fn rotated(&self, r: &Turn) -> Self {
        Self::new(self.atoms.iter().map(|(t, w)| (t + r, w.clone())).collect()).expect("rotation is injective")
    }

    /// Mass of the half-open arc `[start, start + length)`.
    pub fn mass_of(&self, arc: &Arc) -> BigRational {
        self.atoms
            .iter()
            .filter(|(t, _)| arc.contains_half_open(t))
            .map(|(_, w)| w.clone())
            .sum()
    }
}

/// Open arc `(start, start + length)` with `0 < length ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub start: Turn,
    pub length: Turn,
}

impl Arc {
    pub fn new(start: Turn, length: Turn) -> Result<Self, PullbackError> {
        if !length.is_positive() || length > Turn::one() {
            return Err(PullbackError::InvalidArc(format!("length {length} outside (0, 1]")));
        }
        Ok(Self {
            start: frac(&start),
            length,
        })
    }

    fn offset(&self, t: &Turn) -> Turn {
        frac(&(t - &self.start))
    }

    pub fn contains(&self, t: &Turn) -> bool {
        let d = self.offset(t);
        d.is_positive() && d < self.length
    }

    pub fn contains_half_open(&self, t: &Turn) -> bool {
        self.offset(t) < self.length
    }

    pub fn end(&self) -> Turn {
        frac(&(&self.start + &self.length))
    }

    pub fn is_endpoint(&self, t: &Turn) -> bool {
        let t = frac(t);
        t == self.start || t == self.end()
    }
}

/// Finitely many open arcs covering the circle. The order matters for the
/// disjoint pieces `B'_k = B_k \ (B_0 ∪ … ∪ B_{k-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedCovering {
    arcs: Vec<Arc>,
}

impl AdaptedCovering {
    /// Checks that the open arcs cover the circle.
    pub fn new(arcs: Vec<Arc>) -> Result<Self, PullbackError> {
        if arcs.is_empty() {
            return Err(PullbackError::NotACovering { point: "0".into() });
        }
        let mut cuts: Vec<Turn> = arcs.iter().flat_map(|a| [a.start.clone(), a.end()]).collect();
        cuts.sort();
        cuts.dedup();
        let mut probes = cuts.clone();
        for (i, c) in cuts.iter().enumerate() {
            let next = if i + 1 < cuts.len() {
                cuts[i + 1].clone()
            } else {
                &cuts[0] + Turn::one()
            };
            probes.push(frac(&((c + next) / int(2))));
        }
        for p in probes {
            if !arcs.iter().any(|a| a.contains(&p)) {
                return Err(PullbackError::NotACovering { point: p.to_string() });
            }
        }
        Ok(Self { arcs })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Checks that `f` is injective on each arc's closure.
    pub fn check_adapted(&self, f: &CircleMap) -> Result<(), PullbackError> {
        for (i, a) in self.arcs.iter().enumerate() {
            let image = (f.lift(&(&a.start + &a.length)) - f.lift(&a.start)).abs();
            if image >= Turn::one() {
                return Err(PullbackError::NotAdapted {
                    arc: i,
                    image: image.to_string(),
                });
            }
        }
        Ok(())
    }

    fn check_atoms(&self, f: &CircleMap, lambda: &CircleAtomicMeasure) -> Result<(), PullbackError> {
        for (t, _) in lambda.atoms() {
            for p in f.preimages(t) {
                if let Some(arc) = self.arcs.iter().position(|a| a.is_endpoint(&p)) {
                    return Err(PullbackError::AtomOnBoundary {
                        atom: t.to_string(),
                        preimage: p.to_string(),
                        arc,
                    });
                }
            }
        }
        Ok(())
    }

    /// Evenly spaced arcs, shifted so that no endpoint meets a preimage of
    /// an atom of `avoid`.
    pub fn standard(f: &CircleMap, avoid: &CircleAtomicMeasure) -> Self {
        let m = (f.max_slope() * int(2)).floor().to_i64().expect("moderate slope") + 1;
        let prime = 1_000_003;
        for shift in 0.. {
            let arcs = (0..m)
                .map(|j| {
                    let start = turn(4 * j - 1, 4 * m) + turn(shift, 4 * m * prime);
                    Arc::new(start, turn(3, 2 * m)).expect("valid arc")
                })
                .collect();
            let cover = Self::new(arcs).expect("overlapping arcs cover");
            if cover.check_atoms(f, avoid).is_ok() {
                return cover;
            }
        }
        unreachable!("finitely many preimages block finitely many shifts")
    }

    /// Random adapted covering with arcs in random order; endpoints avoid
    /// the preimages of the atoms of `avoid`.
    pub fn random<R: Rng + ?Sized>(f: &CircleMap, avoid: &CircleAtomicMeasure, rng: &mut R) -> Self {
        const DEN: i64 = 1 << 20;
        let slope = f.max_slope();
        let max_gap = Turn::one() / (slope * int(2));
        loop {
            let extra = rng.random_range(0..4);
            let base = (Turn::one() / &max_gap).ceil().to_i64().expect("moderate slope") + extra;
            let mut cuts: Vec<Turn> = (0..base).map(|_| turn(rng.random_range(0..DEN), DEN)).collect();
            cuts.sort();
            cuts.dedup();
            loop {
                let gaps: Vec<Turn> = (0..cuts.len())
                    .map(|i| {
                        let next = cuts.get(i + 1).cloned().unwrap_or(&cuts[0] + Turn::one());
                        next - &cuts[i]
                    })
                    .collect();
                match gaps.iter().position(|g| g > &max_gap) {
                    Some(i) => {
                        let mid = frac(&(&cuts[i] + &gaps[i] / int(2)));
                        cuts.push(mid);
                        cuts.sort();
                    }
                    None => break,
                }
            }
            let n = cuts.len();
            let gaps: Vec<Turn> = (0..n)
                .map(|i| cuts.get(i + 1).cloned().unwrap_or(&cuts[0] + Turn::one()) - &cuts[i])
                .collect();
            let min_gap = gaps.iter().min().expect("at least one gap").clone();
            let mut wiggle = || &min_gap * turn(rng.random_range(1..1000), 4000);
            let mut arcs: Vec<Arc> = (0..n)
                .map(|i| {
                    let (before, after) = (wiggle(), wiggle());
                    Arc::new(&cuts[i] - &before, &gaps[i] + before + after).expect("short arc")
                })
                .collect();
            arcs.shuffle(rng);
            let cover = Self::new(arcs).expect("overlapping arcs cover");
            if cover.check_adapted(f).is_ok() && cover.check_atoms(f, avoid).is_ok() {
                return cover;
            }
        }
    }
}

/// The pull-back `λ_B(A) = Σ_k λ(f(A ∩ B'_k))`, evaluated atom by atom: on
/// each disjoint piece `B'_k` the map is injective, so every preimage of an
/// atom inherits that atom's full weight.
pub fn pullback(
    f: &CircleMap,
    lambda: &CircleAtomicMeasure,
    cover: &AdaptedCovering,
) -> Result<CircleAtomicMeasure, PullbackError> {
    cover.check_adapted(f)?;
    cover.check_atoms(f, lambda)?;
    let mut out = Vec::new();
    for (k, arc) in cover.arcs().iter().enumerate() {
        for (t, w) in lambda.atoms() {
            // f restricted to B_k is injective, so at most one preimage lies in it.
            let Some(x) = f.preimages(t).into_iter().find(|p| arc.contains(p)) else {
                continue;
            };
            if cover.arcs()[..k].iter().any(|b| b.contains_half_open(&x)) {
                continue;
            }
            out.push((x, w.clone()));
        }
    }
    CircleAtomicMeasure::new(out)
}

fn rational_strings(m: &CircleAtomicMeasure) -> Vec<(String, String)> {
    m.atoms().iter().map(|(t, w)| (t.to_string(), w.to_string())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub first: Vec<(String, String)>,
    pub second: Vec<(String, String)>,
    pub pass: bool,
}

/// Pulls back through two coverings and compares the results exactly.
pub fn covering_independence(
    f: &CircleMap,
    lambda: &CircleAtomicMeasure,
    first: &AdaptedCovering,
    second: &AdaptedCovering,
) -> Result<IndependenceReport, PullbackError> {
    let a = pullback(f, lambda, first)?;
    let b = pullback(f, lambda, second)?;
    Ok(IndependenceReport {
        pass: a == b,
        first: rational_strings(&a),
        second: rational_strings(&b),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub degree: i64,
    pub pulled: Vec<(String, String)>,
    pub rotated: Vec<(String, String)>,
    pub pass: bool,
}

/// Checks that the pull-back under `θ ↦ kθ` is invariant under the deck
/// rotation by `1/|k|` turns.
pub fn equivariance_check(
    f: &CircleMap,
    lambda: &CircleAtomicMeasure,
    cover: &AdaptedCovering,
) -> Result<EquivarianceReport, PullbackError> {
    let MapKind::Power(k) = f.kind() else {
        return Err(PullbackError::NotAPowerMap);
    };
    let pulled = pullback(f, lambda, cover)?;
    let rotated = pulled.rotated(&turn(1, k.abs()));
    Ok(EquivarianceReport {
        degree: k,
        pass: pulled == rotated,
        pulled: rational_strings(&pulled),
        rotated: rational_strings(&rotated),
    })
}

/// The measure `μ` downstairs with `p*μ = λ̃` for the covering `p: θ ↦ kθ`:
/// one atom per deck orbit, at the image angle, with the weight of one
/// orbit point.
pub fn induce_quotient(p: &CircleMap, upstairs: &CircleAtomicMeasure) -> Result<CircleAtomicMeasure, PullbackError> {
    let MapKind::Power(k) = p.kind() else {
        return Err(PullbackError::NotAPowerMap);
    };
    let rotated = upstairs.rotated(&turn(1, k.abs()));
    if let Some((t, _)) = rotated.atoms().iter().find(|a| !upstairs.atoms().contains(a)) {
        return Err(PullbackError::NotDeckInvariant {
            turn: frac(&(t - turn(1, k.abs()))).to_string(),
        });
    }
    let mut down: Vec<(Turn, BigRational)> = Vec::new();
    for (t, w) in upstairs.atoms() {
        let image = p.eval(t);
        if !down.iter().any(|(d, _)| *d == image) {
            down.push((image, w.clone()));
        }
    }
    CircleAtomicMeasure::new(down)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientReport {
    pub downstairs: Vec<(String, String)>,
    pub round_trip: Vec<(String, String)>,
    pub pass: bool,
}

/// Induces the quotient measure and pulls it back again.
pub fn quotient_round_trip(
    p: &CircleMap,
    upstairs: &CircleAtomicMeasure,
    cover: &AdaptedCovering,
) -> Result<QuotientReport, PullbackError> {
    let down = induce_quotient(p, upstairs)?;
    let back = pullback(p, &down, cover)?;
    Ok(QuotientReport {
        pass: &back == upstairs,
        downstairs: rational_strings(&down),
        round_trip: rational_strings(&back),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn measure(atoms: &[(i64, i64, i64, i64)]) -> CircleAtomicMeasure {
        CircleAtomicMeasure::new(atoms.iter().map(|&(p, q, a, b)| (turn(p, q), turn(a, b))).collect()).unwrap()
    }

    #[test]
    fn tripling_a_dirac_mass() {
        let f = CircleMap::power(3).unwrap();
        let lambda = CircleAtomicMeasure::dirac(turn(0, 1));
        let cover = AdaptedCovering::standard(&f, &lambda);
        let up = pullback(&f, &lambda, &cover).unwrap();
        assert_eq!(up, measure(&[(0, 1, 1, 1), (1, 3, 1, 1), (2, 3, 1, 1)]));
        assert_eq!(up.total(), int(3));
    }

    #[test]
    fn identity_pullback_is_unchanged() {
        let f = CircleMap::identity();
        let lambda = measure(&[(1, 5, 1, 2), (3, 7, 1, 3), (9, 10, 1, 6)]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cover = AdaptedCovering::random(&f, &lambda, &mut rng);
        assert_eq!(pullback(&f, &lambda, &cover).unwrap(), lambda);
    }

    #[test]
    fn doubling_four_atoms() {
        let f = CircleMap::power(2).unwrap();
        let lambda = measure(&[(0, 1, 1, 4), (1, 4, 1, 4), (1, 2, 1, 4), (3, 4, 1, 4)]);
        let cover = AdaptedCovering::standard(&f, &lambda);
        let up = pullback(&f, &lambda, &cover).unwrap();
        assert_eq!(up.len(), 8);
        assert!(up.atoms().iter().all(|(_, w)| *w == turn(1, 4)));
        assert_eq!(up.total(), int(2));
    }

    #[test]
    fn coverings_must_be_adapted_and_avoid_atoms() {
        let f = CircleMap::power(3).unwrap();
        let lambda = CircleAtomicMeasure::dirac(turn(1, 10));
        let long = AdaptedCovering::new(vec![
            Arc::new(turn(0, 1), turn(1, 2)).unwrap(),
            Arc::new(turn(2, 5), turn(7, 10)).unwrap(),
        ])
        .unwrap();
        assert!(matches!(pullback(&f, &lambda, &long), Err(PullbackError::NotAdapted { arc: 0, .. })));
        let good = AdaptedCovering::standard(&f, &lambda);
        assert!(matches!(
            covering_independence(&f, &lambda, &good, &long),
            Err(PullbackError::NotAdapted { .. })
        ));
        let on_edge = CircleAtomicMeasure::dirac(f.eval(&good.arcs()[1].start));
        assert!(matches!(
            pullback(&f, &on_edge, &good),
            Err(PullbackError::AtomOnBoundary { arc: 1, .. })
        ));
    }

    #[test]
    fn gaps_are_not_coverings() {
        let gap = AdaptedCovering::new(vec![
            Arc::new(turn(0, 1), turn(1, 2)).unwrap(),
            Arc::new(turn(1, 2), turn(1, 2)).unwrap(),
        ]);
        assert!(matches!(gap, Err(PullbackError::NotACovering { .. })));
        assert!(Arc::new(turn(0, 1), turn(0, 1)).is_err());
    }

    #[test]
    fn random_coverings_agree() {
        let f = CircleMap::power(-3).unwrap();
        let lambda = measure(&[(0, 1, 1, 1), (2, 7, 3, 2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = AdaptedCovering::random(&f, &lambda, &mut rng);
        let b = AdaptedCovering::random(&f, &lambda, &mut rng);
        assert_ne!(a, b);
        assert!(covering_independence(&f, &lambda, &a, &b).unwrap().pass);
    }

    #[test]
    fn deck_equivariance() {
        let lambda = CircleAtomicMeasure::dirac(turn(0, 1));
        let f = CircleMap::power(3).unwrap();
        let cover = AdaptedCovering::standard(&f, &lambda);
        assert!(equivariance_check(&f, &lambda, &cover).unwrap().pass);
        let id = CircleMap::identity();
        let cover = AdaptedCovering::standard(&id, &lambda);
        assert!(equivariance_check(&id, &lambda, &cover).unwrap().pass);
        let two = measure(&[(1, 3, 1, 2), (3, 5, 1, 2)]);
        let f = CircleMap::power(2).unwrap();
        let cover = AdaptedCovering::standard(&f, &two);
        let r = equivariance_check(&f, &two, &cover).unwrap();
        assert!(r.pass);
        assert_eq!(r.pulled.len(), 4);
    }

    #[test]
    fn quotient_of_an_orbit() {
        let p = CircleMap::power(3).unwrap();
        let up = measure(&[(0, 1, 1, 1), (1, 3, 1, 1), (2, 3, 1, 1)]);
        let down = induce_quotient(&p, &up).unwrap();
        assert_eq!(down, CircleAtomicMeasure::dirac(turn(0, 1)));
        let cover = AdaptedCovering::standard(&p, &down);
        assert!(quotient_round_trip(&p, &up, &cover).unwrap().pass);

        let id = CircleMap::identity();
        let any = measure(&[(1, 9, 2, 1), (1, 2, 1, 5)]);
        assert_eq!(induce_quotient(&id, &any).unwrap(), any);

        let lopsided = measure(&[(0, 1, 1, 1), (1, 2, 1, 1), (1, 5, 1, 1)]);
        assert!(matches!(
            induce_quotient(&CircleMap::power(2).unwrap(), &lopsided),
            Err(PullbackError::NotDeckInvariant { .. })
        ));
    }

    #[test]
    fn measures_reject_duplicates_and_bad_weights() {
        assert!(CircleAtomicMeasure::new(vec![(turn(1, 4), turn(1, 1)), (turn(5, 4), turn(1, 1))]).is_err());
        assert!(CircleAtomicMeasure::new(vec![(turn(1, 4), turn(0, 1))]).is_err());
        let m = measure(&[(1, 4, 1, 1), (3, 4, 1, 2)]);
        assert_eq!(m.mass_of(&Arc::new(turn(1, 4), turn(1, 2)).unwrap()), int(1));
    }
}
