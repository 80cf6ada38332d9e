//! Resolvent checks and the per-stage inequality suite for the pipeline.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{embed, hermitian_eigenvalues, ks_between, levy_distance, levy_feasible, stieltjes_of, Esd};
use crate::ensemble::{levy_cube_bound, PipelineStages, PipelineTrace, SelfDualMatrix};
use crate::error::{Error, Result};
use crate::structure::{classify, BlockMatrix, StructureClass, StructureReport};

/// `(m − zI)⁻¹` by dense elimination.
pub fn resolvent(m: &BlockMatrix, z: Complex64) -> Result<BlockMatrix> {
    if z.im == 0.0 || !z.im.is_finite() {
        return Err(Error::Domain(format!("resolvent needs Im z ≠ 0, got {z}")));
    }
    m.shift(z).inverse()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventReport {
    pub n: usize,
    pub z: Complex64,
    pub structure: StructureReport,
    /// Every diagonal block of the resolvent is `t·I₂` within tolerance.
    pub diagonal_type_t: bool,
    pub passed: bool,
}

/// Classifies `(embed(w) − zI)⁻¹`, which should be Type-I.
pub fn resolvent_structure_check(w: &SelfDualMatrix, z: Complex64, tol: f64) -> Result<ResolventReport> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("structure check needs Im z > 0, got {z}")));
    }
    let r = resolvent(&embed(w), z)?;
    let structure = classify(&r, tol);
    let diagonal_type_t = structure.diagonal_residual <= tol;
    let passed = diagonal_type_t && structure.satisfies(StructureClass::TypeI);
    Ok(ResolventReport {
        n: w.n(),
        z,
        structure,
        diagonal_type_t,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMinorReport {
    pub n: usize,
    pub z: Complex64,
    /// `2 / Im z`.
    pub bound: f64,
    /// `|tr R − tr R_k|` for each removed quaternion row/column `k`.
    pub differences: Vec<f64>,
    pub max_difference: f64,
    pub violations: usize,
    pub passed: bool,
}

fn resolvent_trace(w: &SelfDualMatrix, z: Complex64) -> Result<Complex64> {
    if w.n() == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let eigs = hermitian_eigenvalues(&embed(w))?;
    Ok(stieltjes_of(&eigs, z)? * eigs.len() as f64)
}

/// Compares `tr(W − z)⁻¹` with the trace for every principal minor that
/// drops one quaternion row and column.
pub fn trace_minor_check(w: &SelfDualMatrix, z: Complex64) -> Result<TraceMinorReport> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("trace-minor check needs Im z > 0, got {z}")));
    }
    let full = resolvent_trace(w, z)?;
    let differences = (0..w.n())
        .into_par_iter()
        .map(|k| resolvent_trace(&w.without(k), z).map(|t| (full - t).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let bound = 2.0 / z.im;
    let violations = differences.iter().filter(|&&d| !(d <= bound)).count();
    Ok(TraceMinorReport {
        n: w.n(),
        z,
        bound,
        max_difference: differences.iter().copied().fold(0.0, f64::max),
        differences,
        violations,
        passed: violations == 0,
    })
}

/// Levy inequality for one consecutive pair of stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageCheck {
    pub from: String,
    pub to: String,
    /// Bisection upper bound on the Levy distance.
    pub levy: f64,
    /// `(1/2n) tr[(A − B)(A − B)*]`.
    pub levy_cube_bound: f64,
    /// Whether `ε = bound^{1/3}` is feasible, i.e. `L³ ≤ bound` exactly.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub n: usize,
    pub stages: Vec<StageCheck>,
    /// Sup-distance between the ESDs before and after truncation.
    pub rank_sup_distance: f64,
    pub rank_bound: f64,
    pub rank_holds: bool,
    pub violations: usize,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

const STAGE_NAMES: [&str; 5] = ["original", "truncated", "diagonal-free", "centered", "rescaled"];

/// Checks the Levy and rank inequalities with eigensolves of every stage.
pub fn pipeline_inequalities(stages: &PipelineStages, trace: &PipelineTrace) -> Result<InequalityReport> {
    let mats = stages.as_array();
    let spectra = mats
        .par_iter()
        .map(|w| hermitian_eigenvalues(&embed(w)).map(Esd::new))
        .collect::<Result<Vec<Esd>>>()?;
    let mut checks = Vec::with_capacity(4);
    for i in 0..4 {
        let bound = levy_cube_bound(mats[i], mats[i + 1]);
        let (f, g) = (&spectra[i], &spectra[i + 1]);
        checks.push(StageCheck {
            from: STAGE_NAMES[i].to_string(),
            to: STAGE_NAMES[i + 1].to_string(),
            levy: levy_distance(f, g),
            levy_cube_bound: bound,
            holds: levy_feasible(f, g, bound.cbrt()),
        });
    }
    let rank_sup_distance = ks_between(&spectra[0], &spectra[1]);
    let rank_bound = trace.truncation.rank_bound;
    let rank_holds = rank_sup_distance <= rank_bound;
    let violations = checks.iter().filter(|c| !c.holds).count() + usize::from(!rank_holds);
    Ok(InequalityReport {
        n: trace.n,
        stages: checks,
        rank_sup_distance,
        rank_bound,
        rank_holds,
        violations,
    })
}
