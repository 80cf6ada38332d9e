//! Spectra of self-dual matrices.
//!
//! A self-dual n×n quaternion matrix embeds as a 2n×2n Hermitian complex
//! matrix whose eigenvalues come in equal pairs. [`SpectralSample`] keeps both
//! the full list and one representative per pair.

mod diagnostics;
pub mod eigen;
mod esd;
mod stieltjes;

pub use diagnostics::{
    pipeline_inequalities, resolvent, resolvent_structure_check, trace_minor_check,
    InequalityReport, ResolventReport, StageCheck, TraceMinorReport,
};
pub use esd::{
    kolmogorov_distance, kolmogorov_semicircle, ks_between, levy_distance, levy_distance_tol,
    levy_feasible, semicircle_cdf, semicircle_pdf, Cdf, Esd, Histogram, Semicircle, LEVY_TOL,
};
pub use stieltjes::{empirical_stieltjes, semicircle_stieltjes, stieltjes_of, StieltjesPoint};

use serde::{Deserialize, Serialize};

use crate::ensemble::SelfDualMatrix;
use crate::error::{Error, Result};
use crate::structure::BlockMatrix;

/// Default bound on the relative gap inside an eigenvalue pair.
pub const DEFAULT_PAIRING_TOL: f64 = 1e-8;

/// Complex 2n×2n embedding: block `(j, k)` is the 2×2 image of the scaled entry.
pub fn embed(w: &SelfDualMatrix) -> BlockMatrix {
    BlockMatrix::from_blocks(w.n(), |j, k| w.entry(j, k).to_complex())
}

/// All eigenvalues of a Hermitian block matrix, ascending.
pub fn hermitian_eigenvalues(m: &BlockMatrix) -> Result<Vec<f64>> {
    eigen::hermitian_eigenvalues_dense(m.dense())
}

/// Pairs consecutive sorted eigenvalues and keeps the first of each pair.
///
/// The residual is the largest intra-pair gap divided by
/// `max(1, spectral radius)`.
pub fn dedup_pairs(eigs: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    if eigs.len() % 2 != 0 {
        return Err(Error::Domain(format!("odd spectrum length {}", eigs.len())));
    }
    let radius = eigs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mut residual = 0.0f64;
    let mut dedup = Vec::with_capacity(eigs.len() / 2);
    for pair in eigs.chunks_exact(2) {
        residual = residual.max((pair[1] - pair[0]).abs() / radius);
        dedup.push(pair[0]);
    }
    if residual > tol || residual.is_nan() {
        return Err(Error::Pairing { residual, tol });
    }
    Ok((dedup, residual))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub n: usize,
    pub eigenvalues_full: Vec<f64>,
    pub eigenvalues_dedup: Vec<f64>,
    pub pairing_residual: f64,
}

impl SpectralSample {
    pub fn from_eigenvalues(eigenvalues_full: Vec<f64>, tol: f64) -> Result<Self> {
        let (eigenvalues_dedup, pairing_residual) = dedup_pairs(&eigenvalues_full, tol)?;
        Ok(Self {
            n: eigenvalues_dedup.len(),
            eigenvalues_full,
            eigenvalues_dedup,
            pairing_residual,
        })
    }

    /// Embeds, eigensolves and deduplicates with [`DEFAULT_PAIRING_TOL`].
    pub fn from_matrix(w: &SelfDualMatrix) -> Result<Self> {
        Self::from_matrix_tol(w, DEFAULT_PAIRING_TOL)
    }

    pub fn from_matrix_tol(w: &SelfDualMatrix, tol: f64) -> Result<Self> {
        Self::from_eigenvalues(hermitian_eigenvalues(&embed(w))?, tol)
    }

    /// ESD over the `n` pair representatives.
    pub fn esd(&self) -> Esd {
        Esd::new(self.eigenvalues_dedup.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion;

    #[test]
    fn embed_single_real_entry() {
        let w = SelfDualMatrix::from_upper_fn(1, 1.0, |_, _| Quaternion::real(5.0)).unwrap();
        let m = embed(&w);
        assert_eq!(m.dense().hermitian_residual(), 0.0);
        assert_eq!(m.get(0, 0).re, 5.0);
        assert_eq!(m.get(1, 1).re, 5.0);
        assert_eq!(m.get(0, 1).norm(), 0.0);
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![5.0, 5.0]);
    }

    #[test]
    fn dedup_examples() {
        assert_eq!(dedup_pairs(&[1.0, 1.0, 2.0, 2.0], 0.0).unwrap(), (vec![1.0, 2.0], 0.0));
        let (d, r) = dedup_pairs(&[1.0, 1.0 + 1e-12, 3.0, 3.0 + 1e-12], 1e-8).unwrap();
        assert_eq!(d, vec![1.0, 3.0]);
        assert!(r > 0.0 && r < 1e-12);
        assert!(matches!(
            dedup_pairs(&[1.0, 2.0, 3.0, 4.0], 1e-8),
            Err(Error::Pairing { .. })
        ));
        assert!(dedup_pairs(&[1.0], 1.0).is_err());
    }
}
