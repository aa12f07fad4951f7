use super::{ComplexError, DeltaComplex, GeometricTriangulation};
use crate::geom::{CutSet, ProjectiveAction};
use crate::measure::{McConfig, MeasureEstimate, MeasureSpec, Tolerances};
use crate::simplex::{self, AngleValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;
use rayon::prelude::*;
use serde::Serialize;

/// Number field for the Gauss–Bonnet sums.
pub trait Scalar: Clone + Num {
    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Link sums, vertex defects and alternating sums of an angle table.
#[derive(Debug, Clone, PartialEq)]
pub struct GbTerms<T> {
    pub chi: i64,
    /// `S(σ)` indexed by `[r][face]`; for a top simplex this is its `T = ∅` entry.
    pub link_sums: Vec<Vec<T>>,
    /// `d(ν)` per vertex.
    pub defects: Vec<T>,
    /// `k(σ^n)` per top simplex.
    pub k: Vec<T>,
    pub sum_d: T,
    pub sum_k: T,
    /// `Σd + Σk - χ`.
    pub residual: T,
}

fn signed<T: Scalar>(x: T, odd: bool) -> T {
    if odd {
        T::zero() - x
    } else {
        x
    }
}

/// Evaluates `S`, `d` and `k` from `angles[t][T]`, indexed by cut-set bits
/// (every `T` with `|T| ≤ n`; an entry for the full set is ignored).
///
/// `Σ_ν d(ν) + Σ k(σ^n) = χ` holds for any table: expanding the vertex sum,
/// each `r`-face contributes `(-1)^r (1 - S(σ^r))`, and the `S` terms regroup
/// into the `k` sums.
pub fn gauss_bonnet_terms<T: Scalar>(
    complex: &DeltaComplex,
    angles: &[Vec<T>],
) -> Result<GbTerms<T>, ComplexError> {
    let n = complex.dim();
    let full = CutSet::full(n + 1);
    if angles.len() != complex.top_count()
        || angles.iter().any(|a| (a.len() as u64) < full.bits())
    {
        return Err(ComplexError::Schema(format!(
            "angle table needs {} rows of {} entries",
            complex.top_count(),
            full.bits()
        )));
    }
    let mut link_sums: Vec<Vec<T>> = complex
        .all_faces()
        .iter()
        .map(|f| vec![T::zero(); f.len()])
        .collect();
    let mut k = Vec::with_capacity(angles.len());
    for (t, row) in angles.iter().enumerate() {
        let mut kt = T::zero();
        for bits in 0..full.bits() {
            let cut = CutSet::from_bits(bits);
            let a = row[bits as usize].clone();
            let (r, f) = complex.face_of(t, cut);
            link_sums[r][f] = link_sums[r][f].clone() + a.clone();
            kt = kt + signed(a, (n - cut.len()) % 2 == 1);
        }
        k.push(kt);
    }
    let mut defects = vec![T::zero(); complex.vertex_count()];
    for (r, faces) in complex.all_faces().iter().enumerate() {
        let weight = T::one() / T::from_i64(r as i64 + 1);
        for (i, tuple) in faces.iter().enumerate() {
            let term = signed(
                weight.clone() * (T::one() - link_sums[r][i].clone()),
                r % 2 == 1,
            );
            for &v in tuple {
                defects[v] = defects[v].clone() + term.clone();
            }
        }
    }
    let chi = complex.euler();
    let sum_d = defects.iter().cloned().fold(T::zero(), |a, b| a + b);
    let sum_k = k.iter().cloned().fold(T::zero(), |a, b| a + b);
    let residual = sum_d.clone() + sum_k.clone() - T::from_i64(chi);
    Ok(GbTerms {
        chi,
        link_sums,
        defects,
        k,
        sum_d,
        sum_k,
        residual,
    })
}

/// Angles of every face in every top simplex, computed in that simplex's
/// developed chart. `rows[t][bits]` holds the angle for cut set `bits`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleTable {
    pub rows: Vec<Vec<AngleValue>>,
}

impl AngleTable {
    /// `(face dimension, face index, top simplex, angle)` for every incidence.
    pub fn incidences<'a>(
        &'a self,
        k: &'a GeometricTriangulation,
    ) -> impl Iterator<Item = (usize, usize, usize, &'a AngleValue)> + 'a {
        self.rows.iter().enumerate().flat_map(move |(t, row)| {
            row.iter().map(move |a| {
                let (r, f) = k.complex().face_of(t, a.cut);
                (r, f, t, a)
            })
        })
    }

    pub fn values(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|a| a.estimate.value).collect())
            .collect()
    }
}

fn simplex_mc(mc: &McConfig, t: usize) -> McConfig {
    mc.derive(t as u64)
}

pub fn angle_table(
    k: &GeometricTriangulation,
    measure: &MeasureSpec,
    mc: &McConfig,
) -> Result<AngleTable, ComplexError> {
    k.check_measure(measure)?;
    let rows = k
        .developed()
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            simplex::all_angles(s, measure, &simplex_mc(mc, t)).map_err(|e| k.locate(t, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AngleTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityViolation {
    pub simplex: usize,
    pub facet: usize,
    /// Index into the measure's support subspaces.
    pub support: usize,
    pub support_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub hyperplanes: usize,
    pub supports: usize,
    pub violations: Vec<TransversalityViolation>,
    pub pass: bool,
}

/// Whether any developed facet hyperplane contains a positive-measure
/// subspace of `measure` (an atom, or a whole support subsphere).
pub fn transversality_check(k: &GeometricTriangulation, measure: &MeasureSpec) -> TransversalityReport {
    let n = k.dim();
    let supports = measure.support();
    let mut violations = Vec::new();
    for (t, s) in k.developed().iter().enumerate() {
        for (i, h) in s.planes().iter().enumerate() {
            for (j, v) in supports.iter().enumerate() {
                if v.inside(h) {
                    violations.push(TransversalityViolation {
                        simplex: t,
                        facet: k.complex().boundaries()[n][t][i],
                        support: j,
                        support_rank: v.rank(),
                    });
                }
            }
        }
    }
    TransversalityReport {
        hyperplanes: k.developed().len() * (n + 1),
        supports: supports.len(),
        pass: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceValue {
    pub dim: usize,
    pub face: usize,
    pub vertices: Vec<usize>,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GbReport {
    pub name: Option<String>,
    pub dim: usize,
    pub measure: String,
    pub chi: i64,
    pub face_counts: Vec<usize>,
    /// `S(σ)` for every proper face.
    pub link_sums: Vec<FaceValue>,
    /// `d(ν)` per vertex.
    pub defects: Vec<MeasureEstimate>,
    /// `k(σ^n)` per top simplex.
    pub k: Vec<MeasureEstimate>,
    /// `λ` of each developed top simplex.
    pub interiors: Vec<MeasureEstimate>,
    pub sum_d: MeasureEstimate,
    pub sum_k: MeasureEstimate,
    pub mu: MeasureEstimate,
    pub rearrangement_residual: f64,
    /// `χ - μ(M)`, for even `n`.
    pub main_theorem_residual: Option<MeasureEstimate>,
    pub transversality: TransversalityReport,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

fn quadrature(errors: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    errors
        .into_iter()
        .map(|(c, s)| c * c * s * s)
        .sum::<f64>()
        .sqrt()
}

fn estimate(value: f64, std_error: f64, samples: u64) -> MeasureEstimate {
    MeasureEstimate {
        value,
        std_error,
        samples,
    }
}

fn first_failures<I: Iterator<Item = String>>(items: I) -> String {
    let all: Vec<String> = items.collect();
    match all.len() {
        0 => "all within tolerance".to_string(),
        n if n <= 5 => all.join("; "),
        n => format!("{}; … {} more", all[..5].join("; "), n - 5),
    }
}

/// Polyhedral Gauss–Bonnet data, the induced measure `μ(M)`, and verdicts.
pub fn gb_report(
    k: &GeometricTriangulation,
    measure: &MeasureSpec,
    mc: &McConfig,
    tol: &Tolerances,
) -> Result<GbReport, ComplexError> {
    let n = k.dim();
    let complex = k.complex();
    let table = angle_table(k, measure, mc)?;
    let full = CutSet::full(n + 1);
    let interiors = k
        .developed()
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            measure
                .eval(&s.interior_region(), &simplex_mc(mc, t).derive(full.bits()))
                .map_err(|e| k.locate(t, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let terms = gauss_bonnet_terms(complex, &table.values())?;

    // Statistical errors of the linear combinations of independent angles.
    let mut link_var: Vec<Vec<f64>> = complex.all_faces().iter().map(|f| vec![0.0; f.len()]).collect();
    let mut samples = 0u64;
    for (r, f, _, a) in table.incidences(k) {
        link_var[r][f] += a.estimate.std_error.powi(2);
        samples = samples.saturating_add(a.estimate.samples);
    }
    let mut defect_var = vec![0.0; complex.vertex_count()];
    for (t, row) in table.rows.iter().enumerate() {
        for a in row {
            let (r, f) = complex.face_of(t, a.cut);
            let tuple = &complex.faces(r)[f];
            let mut distinct = tuple.clone();
            distinct.sort_unstable();
            distinct.dedup();
            for v in distinct {
                let mult = tuple.iter().filter(|w| **w == v).count() as f64;
                defect_var[v] += (mult / (r as f64 + 1.0) * a.estimate.std_error).powi(2);
            }
        }
    }
    let k_est: Vec<MeasureEstimate> = table
        .rows
        .iter()
        .zip(&terms.k)
        .map(|(row, &kv)| {
            estimate(
                kv,
                quadrature(row.iter().map(|a| (1.0, a.estimate.std_error))),
                row.iter().map(|a| a.estimate.samples).sum(),
            )
        })
        .collect();
    let sum_k = estimate(
        terms.sum_k,
        quadrature(k_est.iter().map(|e| (1.0, e.std_error))),
        samples,
    );
    let sum_d = estimate(terms.sum_d, sum_k.std_error, samples);
    let defects: Vec<MeasureEstimate> = terms
        .defects
        .iter()
        .zip(&defect_var)
        .map(|(&d, &v)| estimate(d, v.sqrt(), samples))
        .collect();
    let mu = MeasureEstimate::combine(interiors.iter().map(|e| (1.0, *e)));
    let mut link_sums = Vec::new();
    for r in 0..n {
        for (i, s) in terms.link_sums[r].iter().enumerate() {
            link_sums.push(FaceValue {
                dim: r,
                face: i,
                vertices: complex.faces(r)[i].clone(),
                value: *s,
                std_error: link_var[r][i].sqrt(),
            });
        }
    }

    let transversality = transversality_check(k, measure);
    let mut verdicts = Vec::new();
    verdicts.push(Verdict::new(
        "rearrangement",
        terms.residual.abs() <= tol.exact,
        format!("sum d + sum k - chi = {:e}", terms.residual),
    ));
    let bad: Vec<&FaceValue> = link_sums
        .iter()
        .filter(|f| (f.value - 1.0).abs() > (tol.sigma_factor * f.std_error).max(tol.exact))
        .collect();
    verdicts.push(Verdict::new(
        "link_sums",
        bad.is_empty(),
        first_failures(
            bad.iter()
                .map(|f| format!("S({}-face {} {:?}) = {}", f.dim, f.face, f.vertices, f.value)),
        ),
    ));
    verdicts.push(Verdict::new(
        "transversality",
        transversality.pass,
        first_failures(transversality.violations.iter().map(|v| {
            format!(
                "facet {} of simplex {} contains support subspace {}",
                v.facet, v.simplex, v.support
            )
        })),
    ));
    let sgb_fail: Vec<String> = k_est
        .iter()
        .zip(&interiors)
        .enumerate()
        .filter_map(|(t, (kv, lam))| {
            let factor = if n.is_multiple_of(2) { 2.0 } else { 0.0 };
            let res = MeasureEstimate::combine([(2.0, *kv), (-factor, *lam)]);
            (!res.agrees_with(0.0, tol.sigma_factor, tol.exact))
                .then(|| format!("simplex {t}: 2k - (1 + (-1)^n) lambda = {:e}", res.value))
        })
        .collect();
    verdicts.push(Verdict::new(
        "spherical_gauss_bonnet",
        sgb_fail.is_empty(),
        first_failures(sgb_fail.into_iter()),
    ));
    let main_theorem_residual = if n.is_multiple_of(2) {
        let res = estimate(terms.chi as f64 - mu.value, mu.std_error, mu.samples);
        verdicts.push(Verdict::new(
            "main_theorem",
            res.agrees_with(0.0, tol.sigma_factor, tol.exact),
            format!(
                "chi = {}, mu = {} ± {:e}, residual {:e}",
                terms.chi, mu.value, mu.std_error, res.value
            ),
        ));
        Some(res)
    } else {
        let nonzero: Vec<String> = k_est
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.agrees_with(0.0, tol.sigma_factor, tol.exact))
            .map(|(t, e)| format!("k(simplex {t}) = {:e}", e.value))
            .collect();
        verdicts.push(Verdict::new(
            "odd_dimension_k_vanishes",
            nonzero.is_empty(),
            first_failures(nonzero.into_iter()),
        ));
        None
    };
    let chart = chart_independence(k, measure, mc, tol)?;
    verdicts.push(chart);

    let pass = verdicts.iter().all(|v| v.pass);
    Ok(GbReport {
        name: k.name().map(str::to_string),
        dim: n,
        measure: measure.kind().to_string(),
        chi: terms.chi,
        face_counts: complex.face_counts(),
        link_sums,
        defects,
        k: k_est,
        interiors,
        sum_d,
        sum_k,
        mu,
        rearrangement_residual: terms.residual,
        main_theorem_residual,
        transversality,
        verdicts,
        pass,
    })
}

/// For each pairing `g` of a facet of simplex `a`, the angles at the faces
/// of that facet agree in the charts `dev_a` and `g · dev_a`.
fn chart_independence(
    k: &GeometricTriangulation,
    measure: &MeasureSpec,
    mc: &McConfig,
    tol: &Tolerances,
) -> Result<Verdict, ComplexError> {
    let n = k.dim();
    let mut jobs = Vec::new();
    for (i, p) in k.pairings().iter().enumerate() {
        let (pos, _) = k.pairing_positions(p)?;
        for cut in simplex::face_cuts(&k.developed()[p.simplex_a]) {
            if cut.contains(pos) {
                jobs.push((i, p, cut));
            }
        }
    }
    let base = mc.derive(u64::MAX);
    let outcomes = jobs
        .par_iter()
        .map(|&(i, p, cut)| {
            let s = &k.developed()[p.simplex_a];
            let moved = s.transformed(&p.map)?;
            let tag = ((i as u64) << 8) | cut.bits();
            let a = simplex::angle(s, cut, measure, &base.derive(2 * tag))
                .map_err(|e| k.locate(p.simplex_a, e))?;
            let b = simplex::angle(&moved, cut, measure, &base.derive(2 * tag + 1))
                .map_err(|e| k.locate(p.simplex_a, e))?;
            let delta = MeasureEstimate::combine([(1.0, a.estimate), (-1.0, b.estimate)]);
            Ok((i, p.face, cut, delta))
        })
        .collect::<Result<Vec<_>, ComplexError>>()?;
    let failures: Vec<String> = outcomes
        .iter()
        .filter(|(_, _, _, d)| !d.agrees_with(0.0, tol.sigma_factor, tol.exact))
        .map(|(i, face, cut, d)| {
            format!(
                "pairing {i} (facet {face}), cut {:?}: difference {:e}",
                cut.indices().collect::<Vec<_>>(),
                d.value
            )
        })
        .collect();
    let detail = if outcomes.is_empty() {
        "no pairings supplied".to_string()
    } else if failures.is_empty() {
        format!("{} facet angles agree across charts (n = {n})", outcomes.len())
    } else {
        first_failures(failures.iter().cloned())
    };
    Ok(Verdict::new("chart_independence", failures.is_empty(), detail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrangement_holds_for_arbitrary_tables() {
        let faces = vec![
            (0..4).map(|i| vec![i]).collect(),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        ];
        let k = DeltaComplex::new(4, faces, None).unwrap();
        let table: Vec<Vec<BigRational>> = (0..4)
            .map(|t| {
                (0..7)
                    .map(|c| BigRational::new(BigInt::from(3 * t + c + 1), BigInt::from(c + 5)))
                    .collect()
            })
            .collect();
        let terms = gauss_bonnet_terms(&k, &table).unwrap();
        assert_eq!(terms.chi, 2);
        assert_eq!(terms.residual, BigRational::from_integer(BigInt::from(0)));
    }

    #[test]
    fn wrong_table_shape_is_rejected() {
        let k = DeltaComplex::new(1, vec![vec![vec![0]], vec![vec![0, 0]]], None).unwrap();
        assert!(gauss_bonnet_terms(&k, &[vec![0.5, 0.5]]).is_err());
        let terms = gauss_bonnet_terms(&k, &[vec![1.0, 0.5, 0.5]]).unwrap();
        // One vertex with link sum 1, one edge with S = 1: no defect, k = 0.
        assert_eq!(terms.defects, vec![0.0]);
        assert_eq!(terms.k, vec![0.0]);
    }
}
