use super::{McConfig, MeasureError, MeasureEstimate, MeasureSpec};
use crate::geom::{Hyperplane, ProjectiveAction, ProjectiveMap, Region};
use num_traits::Signed;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Acceptance thresholds: Monte Carlo discrepancies within
/// `sigma_factor · σ`, exact ones within `exact`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sigma_factor: f64,
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sigma_factor: 4.0,
            exact: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceEntry {
    pub generator: usize,
    pub region: usize,
    /// `λ(R)`.
    pub before: MeasureEstimate,
    /// `λ(gR)`.
    pub after: MeasureEstimate,
    pub discrepancy: f64,
    pub allowance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub entries: Vec<InvarianceEntry>,
    pub max_discrepancy: f64,
    pub pass: bool,
}

/// Compares `λ(gR)` with `λ(R)` for every generator and trial region.
/// Atomic measures are compared in exact arithmetic.
pub fn check_invariance(
    measure: &MeasureSpec,
    generators: &[ProjectiveMap],
    regions: &[Region],
    mc: &McConfig,
    tol: &Tolerances,
) -> Result<InvarianceReport, MeasureError> {
    for g in generators {
        if g.ambient_dim() != measure.dim() {
            return Err(MeasureError::DimensionMismatch {
                expected: measure.dim(),
                found: g.ambient_dim(),
            });
        }
    }
    let at = |generator: usize, region: usize| {
        move |e: MeasureError| MeasureError::AtRegion {
            generator,
            region,
            source: Box::new(e),
        }
    };
    let atomic = measure.as_atomic();
    let mut entries = Vec::with_capacity(generators.len() * regions.len());
    for (gi, g) in generators.iter().enumerate() {
        for (ri, r) in regions.iter().enumerate() {
            let moved = r.transformed(g).map_err(|e| at(gi, ri)(e.into()))?;
            let entry = if let Some(a) = atomic {
                let lhs = a.mass(std::slice::from_ref(r)).map_err(at(gi, ri))?;
                let rhs = a.mass(std::slice::from_ref(&moved)).map_err(at(gi, ri))?;
                let diff = super::atomic::rational_to_f64(&(&rhs - &lhs).abs());
                InvarianceEntry {
                    generator: gi,
                    region: ri,
                    before: MeasureEstimate::exact(super::atomic::rational_to_f64(&lhs)),
                    after: MeasureEstimate::exact(super::atomic::rational_to_f64(&rhs)),
                    discrepancy: diff,
                    allowance: tol.exact,
                    pass: diff <= tol.exact,
                }
            } else {
                let lhs = measure
                    .eval(r, &mc.derive(ri as u64))
                    .map_err(at(gi, ri))?;
                let tag = ((gi as u64 + 1) << 32) | ri as u64;
                let rhs = measure.eval(&moved, &mc.derive(tag)).map_err(at(gi, ri))?;
                let delta = MeasureEstimate::combine([(1.0, rhs), (-1.0, lhs)]);
                let allowance = delta.allowance(tol.sigma_factor, tol.exact);
                InvarianceEntry {
                    generator: gi,
                    region: ri,
                    before: lhs,
                    after: rhs,
                    discrepancy: delta.value.abs(),
                    allowance,
                    pass: delta.value.abs() <= allowance,
                }
            };
            entries.push(entry);
        }
    }
    let max_discrepancy = entries.iter().map(|e| e.discrepancy).fold(0.0, f64::max);
    let pass = entries.iter().all(|e| e.pass);
    Ok(InvarianceReport {
        entries,
        max_discrepancy,
        pass,
    })
}

/// Intersection of `halves` half-spaces with Gaussian normals.
pub fn random_region<R: Rng + ?Sized>(rng: &mut R, dim: usize, halves: usize) -> Region {
    loop {
        let planes: Option<Vec<Hyperplane>> = (0..halves)
            .map(|_| {
                let v: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
                Hyperplane::new(v).ok()
            })
            .collect();
        if let Some(planes) = planes {
            if let Ok(r) = Region::new(dim, planes) {
                return r;
            }
        }
    }
}
