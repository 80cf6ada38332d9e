//! Truncation, diagonal removal, centralization and rescaling.
//!
//! Every stage works on unscaled entries `x_jk` (the stored matrix keeps its
//! `1/√n` factor) and returns a record of what it changed. The Levy and rank
//! bounds recorded here are checked against eigensolves in
//! [`crate::spectra::pipeline_inequalities`].

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{sample_general, truncated_moments, EnsembleSpec, EntryMoments, MomentMethod, SelfDualMatrix};
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::rng::{derive_seed, rng_from_seed, STREAM_REPLACE};

use super::moments::{lindeberg_tails, DEFAULT_MC_SAMPLES};

/// Entries whose truncated variance falls below this are replaced by ±1.
pub const VARIANCE_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStage {
    pub eta_n: f64,
    /// `η_n √n`, compared against unscaled norms.
    pub threshold: f64,
    /// Off-diagonal pairs plus diagonal entries that were zeroed.
    pub truncated_count: usize,
    pub truncated_pairs: usize,
    pub truncated_diagonal: usize,
    /// Upper bound on the complex rank of `W − W̃`.
    pub rank: usize,
    /// `rank / 2n`, a bound on the sup-distance between the two ESDs.
    pub rank_bound: f64,
    pub levy_cube_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalStage {
    pub removed: usize,
    pub levy_cube_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringStage {
    /// Truncated mean subtracted from every off-diagonal entry above the diagonal.
    pub mean: Quaternion,
    /// `‖E x̃‖`.
    pub shift_norm: f64,
    /// `E‖x‖² I(‖x‖ > η√n) / (η√n)`, which dominates `shift_norm`.
    pub shift_bound: f64,
    pub method: MomentMethod,
    pub levy_cube_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleStage {
    /// Variance of a truncated, centered entry.
    pub variance: f64,
    /// Number of ordered pairs `(j, k)`, `j ≠ k`, in the low-variance set.
    pub replaced: usize,
    /// Seed of the ±1 replacement stream, when replacements were drawn.
    pub replacement_seed: Option<u64>,
    pub levy_cube_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub n: usize,
    pub seed: u64,
    pub truncation: TruncationStage,
    pub diagonal: DiagonalStage,
    pub centering: CenteringStage,
    pub rescale: RescaleStage,
    /// Largest unscaled entry norm of the final matrix.
    pub final_max_norm: f64,
    /// Bound the final entries must respect: `(η√n + ‖E x̃‖)/σ`, or 1 after replacement.
    pub final_entry_bound: f64,
    pub final_diagonal_zero: bool,
}

impl PipelineTrace {
    /// Structural conditions on the final matrix: zero diagonal and bounded entries.
    pub fn final_conditions_hold(&self) -> bool {
        self.final_diagonal_zero && self.final_max_norm <= self.final_entry_bound
    }
}

/// Matrices after each stage, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineStages {
    pub original: SelfDualMatrix,
    pub truncated: SelfDualMatrix,
    pub diagonal_free: SelfDualMatrix,
    pub centered: SelfDualMatrix,
    pub rescaled: SelfDualMatrix,
}

impl PipelineStages {
    pub fn as_array(&self) -> [&SelfDualMatrix; 5] {
        [
            &self.original,
            &self.truncated,
            &self.diagonal_free,
            &self.centered,
            &self.rescaled,
        ]
    }
}

/// `(1/2n) tr[(A − B)(A − B)*]` for the complex embeddings of two scaled
/// matrices. Each quaternion entry contributes `2‖Δ_jk‖²` to the trace.
pub fn levy_cube_bound(a: &SelfDualMatrix, b: &SelfDualMatrix) -> f64 {
    assert_eq!(a.n(), b.n(), "dimension mismatch");
    let n = a.n();
    let mut acc = 0.0;
    for j in 0..n {
        acc += (a.entry(j, j) - b.entry(j, j)).norm_sqr();
        for k in j + 1..n {
            acc += 2.0 * (a.entry(j, k) - b.entry(j, k)).norm_sqr();
        }
    }
    acc / n as f64
}

fn ensure_valid(w: &SelfDualMatrix, stage: &str) -> Result<()> {
    if w.is_valid() {
        Ok(())
    } else {
        Err(Error::Spec(format!("{stage} produced an invalid self-dual matrix")))
    }
}

/// Zeroes every entry with `‖x_jk‖ > η_n √n`.
pub fn truncate(w: &SelfDualMatrix, eta_n: f64) -> Result<(SelfDualMatrix, TruncationStage)> {
    if !(eta_n > 0.0) {
        return Err(Error::Domain(format!("η_n must be positive, got {eta_n}")));
    }
    let n = w.n();
    let threshold = eta_n * (n as f64).sqrt();
    let mut out = w.clone();
    let mut touched = vec![false; n];
    let (mut pairs, mut diag) = (0, 0);
    for j in 0..n {
        for k in j..n {
            if w.raw(j, k).norm() > threshold {
                out.set_raw(j, k, Quaternion::ZERO);
                touched[j] = true;
                touched[k] = true;
                if j == k {
                    diag += 1;
                } else {
                    pairs += 1;
                }
            }
        }
    }
    // A pair fills a rank-4 patch of the embedding, a diagonal entry rank 2;
    // the patch also lives in the rows it touches.
    let rows = touched.iter().filter(|&&t| t).count();
    let rank = (4 * pairs + 2 * diag).min(2 * rows);
    ensure_valid(&out, "truncation")?;
    let stage = TruncationStage {
        eta_n,
        threshold,
        truncated_count: pairs + diag,
        truncated_pairs: pairs,
        truncated_diagonal: diag,
        rank,
        rank_bound: rank as f64 / (2 * n) as f64,
        levy_cube_bound: levy_cube_bound(w, &out),
    };
    Ok((out, stage))
}

pub fn zero_diagonal(w: &SelfDualMatrix) -> Result<(SelfDualMatrix, DiagonalStage)> {
    let mut out = w.clone();
    let mut removed = 0;
    for j in 0..w.n() {
        if w.raw(j, j) != Quaternion::ZERO {
            removed += 1;
        }
        out.set_raw(j, j, Quaternion::ZERO);
    }
    ensure_valid(&out, "diagonal removal")?;
    let stage = DiagonalStage {
        removed,
        levy_cube_bound: levy_cube_bound(w, &out),
    };
    Ok((out, stage))
}

/// Subtracts the truncated mean from every off-diagonal entry `x_jk`, `j < k`
/// (the mirrored entries follow by self-duality).
///
/// `moments` must describe the truncation applied to `w`; `tail` is the
/// off-diagonal tail moment `E‖x‖² I(‖x‖ > threshold)` used for the bound.
pub fn centralize(
    w: &SelfDualMatrix,
    moments: &EntryMoments,
    tail: f64,
) -> Result<(SelfDualMatrix, CenteringStage)> {
    let mu = moments.mean;
    let mut out = w.clone();
    if mu != Quaternion::ZERO {
        for j in 0..w.n() {
            for k in j + 1..w.n() {
                out.set_raw(j, k, w.raw(j, k) - mu);
            }
        }
    }
    ensure_valid(&out, "centralization")?;
    let stage = CenteringStage {
        mean: mu,
        shift_norm: mu.norm(),
        shift_bound: if moments.threshold > 0.0 {
            tail / moments.threshold
        } else {
            f64::INFINITY
        },
        method: moments.method,
        levy_cube_bound: levy_cube_bound(w, &out),
    };
    Ok((out, stage))
}

/// Divides off-diagonal entries by the truncated standard deviation, or
/// replaces every off-diagonal pair by an independent real ±1 when the
/// variance is below [`VARIANCE_FLOOR`].
pub fn rescale(
    w: &SelfDualMatrix,
    moments: &EntryMoments,
    replacement_seed: u64,
) -> Result<(SelfDualMatrix, RescaleStage)> {
    let n = w.n();
    let variance = moments.variance();
    let mut out = w.clone();
    let (replaced, seed) = if variance < VARIANCE_FLOOR {
        let mut rng = rng_from_seed(replacement_seed);
        for j in 0..n {
            for k in j + 1..n {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                out.set_raw(j, k, Quaternion::real(s));
            }
        }
        (n * n.saturating_sub(1), Some(replacement_seed))
    } else {
        let inv = 1.0 / variance.sqrt();
        for j in 0..n {
            for k in j + 1..n {
                out.set_raw(j, k, w.raw(j, k).scale(inv));
            }
        }
        (0, None)
    };
    ensure_valid(&out, "rescaling")?;
    let stage = RescaleStage {
        variance,
        replaced,
        replacement_seed: seed,
        levy_cube_bound: levy_cube_bound(w, &out),
    };
    Ok((out, stage))
}

/// Samples from `spec` and runs all four stages with `η_n = spec.eta_n()`.
pub fn run_pipeline(spec: &EnsembleSpec) -> Result<(PipelineTrace, PipelineStages)> {
    run_pipeline_with(spec, DEFAULT_MC_SAMPLES)
}

/// [`run_pipeline`] with an explicit Monte Carlo budget for moments that have
/// no closed form.
pub fn run_pipeline_with(
    spec: &EnsembleSpec,
    mc_samples: usize,
) -> Result<(PipelineTrace, PipelineStages)> {
    let original = sample_general(spec)?;
    let eta_n = spec.eta_n();
    let (truncated, truncation) = truncate(&original, eta_n)?;
    let (diagonal_free, diagonal) = zero_diagonal(&truncated)?;
    let threshold = truncation.threshold;
    let moments = truncated_moments(&spec.distribution, threshold, spec.seed, mc_samples)?;
    let tails = lindeberg_tails(&spec.distribution, threshold, spec.seed, mc_samples)?;
    let (centered, centering) = centralize(&diagonal_free, &moments, tails.off_diagonal)?;
    let replacement_seed = derive_seed(spec.seed, &[STREAM_REPLACE]);
    let (rescaled, rescale) = rescale(&centered, &moments, replacement_seed)?;

    let final_max_norm = rescaled
        .off_diagonal()
        .map(|(_, _, q)| q.norm())
        .fold(0.0f64, f64::max);
    let final_entry_bound = if rescale.replaced > 0 {
        1.0
    } else {
        (threshold + centering.shift_norm) / rescale.variance.sqrt()
    };
    let trace = PipelineTrace {
        n: spec.n,
        seed: spec.seed,
        truncation,
        diagonal,
        centering,
        rescale,
        final_max_norm,
        final_entry_bound,
        final_diagonal_zero: (0..spec.n).all(|j| rescaled.raw(j, j) == Quaternion::ZERO),
    };
    let stages = PipelineStages {
        original,
        truncated,
        diagonal_free,
        centered,
        rescaled,
    };
    Ok((trace, stages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_gse, EntryLaw, EtaSchedule};

    fn diag_matrix(n: usize, c: f64) -> SelfDualMatrix {
        SelfDualMatrix::from_upper_fn(n, 1.0 / (n as f64).sqrt(), |j, k| {
            if j == k {
                Quaternion::real(c)
            } else {
                Quaternion::ZERO
            }
        })
        .unwrap()
    }

    #[test]
    fn truncation_with_large_threshold_is_identity() {
        let w = sample_gse(30, 1).unwrap();
        let (t, stage) = truncate(&w, 100.0).unwrap();
        assert_eq!(t, w);
        assert_eq!(stage.truncated_count, 0);
        assert_eq!(stage.rank_bound, 0.0);
        assert_eq!(stage.levy_cube_bound, 0.0);
    }

    #[test]
    fn single_pair_rank() {
        let n = 5;
        let mut w = SelfDualMatrix::zeros(n, 1.0 / (n as f64).sqrt());
        w.set_raw(0, 1, Quaternion::new(10.0, 0.0, 0.0, 0.0));
        w.set_raw(2, 3, Quaternion::new(0.1, 0.0, 0.0, 0.0));
        let (t, stage) = truncate(&w, 1.0).unwrap();
        assert_eq!(stage.truncated_pairs, 1);
        assert_eq!(stage.rank, 4);
        assert_eq!(stage.rank_bound, 4.0 / 10.0);
        assert_eq!(t.raw(1, 0), Quaternion::ZERO);
        assert_eq!(t.raw(2, 3).a, 0.1);
    }

    #[test]
    fn diagonal_bound_matches_direct_computation() {
        let n = 7;
        let c = 1.5;
        let (out, stage) = zero_diagonal(&diag_matrix(n, c)).unwrap();
        assert!((stage.levy_cube_bound - c * c / n as f64).abs() < 1e-15);
        assert_eq!(stage.removed, n);
        let (_, again) = zero_diagonal(&out).unwrap();
        assert_eq!(again.levy_cube_bound, 0.0);
        assert_eq!(again.removed, 0);
    }

    #[test]
    fn gse_centering_is_a_no_op() {
        let spec = EnsembleSpec::gse(20, 3);
        let (trace, stages) = run_pipeline(&spec).unwrap();
        assert_eq!(trace.centering.shift_norm, 0.0);
        assert_eq!(stages.centered, stages.diagonal_free);
        assert_eq!(trace.rescale.replaced, 0);
        assert!(trace.final_conditions_hold());
    }

    #[test]
    fn low_variance_triggers_replacement() {
        // η_n √n = 0.5 cuts every Rademacher entry (norm 1), so σ² = 0.
        let spec = EnsembleSpec::new(9, EntryLaw::Rademacher, 4)
            .with_eta(EtaSchedule::Constant { value: 0.5 / 3.0 });
        let (trace, stages) = run_pipeline(&spec).unwrap();
        assert_eq!(trace.rescale.replaced, 9 * 8);
        for (_, _, q) in stages.rescaled.off_diagonal() {
            assert!(q.is_real() && q.a.abs() == 1.0);
        }
        assert!(trace.final_conditions_hold());
    }

    #[test]
    fn asymmetric_law_is_shifted_by_truncated_mean() {
        let law = EntryLaw::Discrete {
            values: vec![3.0, -1.0],
            probs: vec![0.25, 0.75],
        };
        // Threshold 0.9: only the all-low atom survives.
        let n = 16;
        let spec = EnsembleSpec::new(n, law, 11).with_eta(EtaSchedule::Constant { value: 0.9 / 4.0 });
        let (trace, stages) = run_pipeline(&spec).unwrap();
        let mu = trace.centering.mean;
        assert!(mu.norm() > 0.0);
        assert!(trace.centering.shift_norm <= trace.centering.shift_bound);
        for (j, k, q) in stages.centered.off_diagonal() {
            assert_eq!(q, stages.diagonal_free.raw(j, k) - mu);
        }
    }
}
