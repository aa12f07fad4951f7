use super::{ComplexError, GeometricTriangulation};
use crate::geom::{ProjectiveAction, ProjectiveMap, Region, MATCH_TOLERANCE};
use crate::measure::{AtomicMeasure, McConfig, MeasureEstimate, MeasureSpec, Tolerances};
use serde::Serialize;
use std::collections::VecDeque;

/// Upper bound on the number of distinct holonomy words explored.
const MAX_WORDS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyStatus {
    /// The chart data agree with the sign of `χ`.
    Consistent,
    /// A lower bound cannot settle the question.
    Undetermined,
    /// Odd dimension: the dichotomy is stated for even `n` only.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomCoverage {
    pub point: Vec<f64>,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub dim: usize,
    pub chi: i64,
    pub words: usize,
    pub charts: usize,
    /// Measure on `RP^n` of the union of translated developed simplices, a
    /// lower bound for the measure of the developing image.
    pub lower_bound: MeasureEstimate,
    pub certified_positive: bool,
    pub certified_full: bool,
    pub atoms: Option<Vec<AtomCoverage>>,
    pub status: DichotomyStatus,
    pub detail: String,
}

/// Distinct products of at most `depth` generators and their inverses,
/// starting with the identity.
pub fn holonomy_words(generators: &[ProjectiveMap], dim: usize, depth: usize) -> Vec<ProjectiveMap> {
    let moves: Vec<ProjectiveMap> = generators
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    let mut words = vec![ProjectiveMap::identity(dim)];
    let mut frontier = VecDeque::from([(ProjectiveMap::identity(dim), 0usize)]);
    while let Some((w, len)) = frontier.pop_front() {
        if len == depth {
            continue;
        }
        for m in &moves {
            let next = m.compose(&w);
            if words.len() < MAX_WORDS
                && !words.iter().any(|x| x.projectively_eq(&next, MATCH_TOLERANCE))
            {
                words.push(next.clone());
                frontier.push_back((next, len + 1));
            }
        }
    }
    words
}

/// Compares the chart-union lower bound for `λ(Ω)` (and, for a finite
/// invariant set, which of its points the charts reach) with the sign of
/// `χ`. A positive bound with `χ = 0`, a covered invariant point with
/// `χ = 0`, or `χ < 0` is an error: no invariant measure allows it.
pub fn dichotomy_check(
    k: &GeometricTriangulation,
    measure: &MeasureSpec,
    invariant_set: Option<&AtomicMeasure>,
    depth: usize,
    mc: &McConfig,
    tol: &Tolerances,
) -> Result<DichotomyReport, ComplexError> {
    let n = k.dim();
    k.check_measure(measure)?;
    let chi = k.euler();
    let words = holonomy_words(k.holonomy(), n, depth);
    let mut charts: Vec<Region> = Vec::with_capacity(words.len() * k.developed().len());
    for w in &words {
        for s in k.developed() {
            charts.push(s.interior_region().transformed(w)?);
        }
    }
    let mut both = charts.clone();
    both.extend(charts.iter().map(Region::antipodal));
    let lower_bound = measure.eval_union(&both, mc)?.scale(0.5);
    let certified_positive = lower_bound.value - tol.sigma_factor * lower_bound.std_error > tol.exact;
    let certified_full = lower_bound.agrees_with(1.0, tol.sigma_factor, tol.exact);

    let atoms = match invariant_set {
        None => None,
        Some(set) => {
            if set.dim() != n {
                return Err(ComplexError::DimensionMismatch {
                    manifold: n,
                    measure: set.dim(),
                });
            }
            for (i, g) in k.holonomy().iter().enumerate() {
                if !set.is_invariant_under(g)? {
                    return Err(ComplexError::NotInvariant { generator: i });
                }
            }
            let mut out = Vec::with_capacity(set.len());
            for a in set.atoms() {
                let single = AtomicMeasure::dirac(a.point.clone());
                let covered = single.mass(&both)? > num_traits::Zero::zero();
                out.push(AtomCoverage {
                    point: a.point.to_vec(),
                    covered,
                });
            }
            Some(out)
        }
    };

    let report = |status, detail: String| DichotomyReport {
        dim: n,
        chi,
        words: words.len(),
        charts: charts.len(),
        lower_bound,
        certified_positive,
        certified_full,
        atoms: atoms.clone(),
        status,
        detail,
    };
    if n % 2 == 1 {
        return Ok(report(
            DichotomyStatus::NotApplicable,
            "odd dimension".to_string(),
        ));
    }
    if chi < 0 {
        return Err(ComplexError::InconsistentDichotomy {
            chi,
            detail: "an invariant probability measure forces chi >= 0".to_string(),
        });
    }
    let covered = atoms.as_ref().map(|a| a.iter().filter(|c| c.covered).count());
    if chi == 0 {
        if certified_positive {
            return Err(ComplexError::InconsistentDichotomy {
                chi,
                detail: format!(
                    "chart union has measure {} ± {:e} > 0",
                    lower_bound.value, lower_bound.std_error
                ),
            });
        }
        if let Some(c) = covered.filter(|c| *c > 0) {
            return Err(ComplexError::InconsistentDichotomy {
                chi,
                detail: format!("{c} invariant points lie in the developing image"),
            });
        }
        return Ok(report(
            DichotomyStatus::Consistent,
            "chi = 0 and the charts carry no measure".to_string(),
        ));
    }
    match (covered, atoms.as_ref().map(Vec::len)) {
        (Some(c), Some(total)) if c == total => Ok(report(
            DichotomyStatus::Consistent,
            format!("chi = {chi} > 0 and all {total} invariant points lie in the charts"),
        )),
        (Some(c), Some(total)) => Ok(report(
            DichotomyStatus::Undetermined,
            format!("chi = {chi} > 0 but only {c} of {total} invariant points lie in the explored charts"),
        )),
        _ if certified_full => Ok(report(
            DichotomyStatus::Consistent,
            format!("chi = {chi} > 0 and the charts have full measure"),
        )),
        _ => Ok(report(
            DichotomyStatus::Undetermined,
            format!(
                "chi = {chi} > 0; chart union measure {} is only a lower bound",
                lower_bound.value
            ),
        )),
    }
}
