//! Quaternion self-dual Hermitian ensembles.
//!
//! Entries above and on the diagonal are independent. Off-diagonal entries
//! have four i.i.d. coefficients of variance 1/4, so `E‖x‖² = 1`; diagonal
//! entries are real with variance 1. The matrix is scaled by `1/√n`.

mod moments;
mod pipeline;

pub use moments::{
    lindeberg_statistic, lindeberg_tails, max_entry_norms, truncated_moments, EntryMoments,
    MomentMethod, TailMoments, DEFAULT_MC_SAMPLES,
};
pub use pipeline::{
    centralize, levy_cube_bound, rescale, run_pipeline, run_pipeline_with, truncate, zero_diagonal,
    CenteringStage, DiagonalStage, PipelineStages, PipelineTrace, RescaleStage, TruncationStage,
    VARIANCE_FLOOR,
};

use rand::Rng as _;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::rng::{rng_from_seed, Rng};

/// n×n self-dual Hermitian quaternion matrix `W = scale · X`.
///
/// Only the upper triangle (diagonal included) of the unscaled `X` is stored;
/// `x_kj = conj(x_jk)` is implied and diagonal entries are real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfDualMatrix {
    n: usize,
    scale: f64,
    upper: Vec<Quaternion>,
}

#[inline]
fn packed_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j <= k && k < n);
    // Row j starts after sum_{r<j} (n - r) entries.
    j * n - j * j.saturating_sub(1) / 2 + (k - j)
}

impl SelfDualMatrix {
    pub fn zeros(n: usize, scale: f64) -> Self {
        Self {
            n,
            scale,
            upper: vec![Quaternion::ZERO; n * (n + 1) / 2],
        }
    }

    /// Builds from raw upper-triangle entries `f(j, k)`, `j <= k`.
    pub fn from_upper_fn(
        n: usize,
        scale: f64,
        mut f: impl FnMut(usize, usize) -> Quaternion,
    ) -> Result<Self> {
        let mut m = Self::zeros(n, scale);
        for j in 0..n {
            for k in j..n {
                let q = f(j, k);
                if j == k && !q.is_real() {
                    return Err(Error::Spec(format!("diagonal entry ({j},{j}) = {q} is not real")));
                }
                m.upper[packed_index(n, j, k)] = q;
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The normalization applied to the raw entries (`1/√n` for samples).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Unscaled entry `x_jk`.
    pub fn raw(&self, j: usize, k: usize) -> Quaternion {
        if j <= k {
            self.upper[packed_index(self.n, j, k)]
        } else {
            self.upper[packed_index(self.n, k, j)].conj()
        }
    }

    /// Scaled entry `scale · x_jk`.
    pub fn entry(&self, j: usize, k: usize) -> Quaternion {
        self.raw(j, k).scale(self.scale)
    }

    /// Sets `x_jk` (and implicitly `x_kj`). Diagonal entries keep only their
    /// real part.
    pub fn set_raw(&mut self, j: usize, k: usize, q: Quaternion) {
        let (j, k, q) = if j <= k { (j, k, q) } else { (k, j, q.conj()) };
        let q = if j == k { Quaternion::real(q.a) } else { q };
        self.upper[packed_index(self.n, j, k)] = q;
    }

    /// Self-duality holds by storage; checks real finite diagonal and finite entries.
    pub fn is_valid(&self) -> bool {
        let finite = self
            .upper
            .iter()
            .all(|q| q.a.is_finite() && q.b.is_finite() && q.c.is_finite() && q.d.is_finite());
        finite && (0..self.n).all(|j| self.raw(j, j).is_real())
    }

    /// Copy with quaternion row and column `k` removed, same scale.
    pub fn without(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k).collect();
        let mut out = Self::zeros(self.n - 1, self.scale);
        for (a, &j) in keep.iter().enumerate() {
            for (b, &l) in keep.iter().enumerate().skip(a) {
                out.upper[packed_index(out.n, a, b)] = self.raw(j, l);
            }
        }
        out
    }

    /// Iterator over `(j, k, raw)` for `j < k`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, Quaternion)> + '_ {
        (0..self.n).flat_map(move |j| (j + 1..self.n).map(move |k| (j, k, self.raw(j, k))))
    }
}

/// Coefficient law of the entries.
///
/// Serialized as `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum EntryLaw {
    /// Gaussian coefficients: variance 1/4 off the diagonal, real N(0, 1) diagonal.
    Gse,
    /// Coefficients ±1/2 off the diagonal, real ±1 diagonal.
    Rademacher,
    /// Coefficients uniform on [−√3/2, √3/2], diagonal uniform on [−√3, √3].
    Uniform,
    /// Finite-support coefficient law, rescaled to variance 1/4 (off-diagonal)
    /// and 1 (diagonal). Must have mean zero.
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

impl EntryLaw {
    pub fn name(&self) -> &'static str {
        match self {
            EntryLaw::Gse => "gse",
            EntryLaw::Rademacher => "rademacher",
            EntryLaw::Uniform => "uniform",
            EntryLaw::Discrete { .. } => "discrete",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let EntryLaw::Discrete { .. } = self {
            self.discrete_support()?;
        }
        Ok(())
    }

    /// Normalized supports `(off-diagonal coefficient, diagonal)` for a
    /// discrete law, each as `(value, probability)` pairs.
    pub(crate) fn discrete_support(&self) -> Result<Option<(Vec<(f64, f64)>, Vec<(f64, f64)>)>> {
        let EntryLaw::Discrete { values, probs } = self else {
            return Ok(None);
        };
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::Spec(format!(
                "discrete law needs matching non-empty values/probs, got {} and {}",
                values.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite())
            || values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::Spec("discrete law has invalid values or probabilities".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Spec(format!("probabilities sum to {total}, not 1")));
        }
        let mean: f64 = values.iter().zip(probs).map(|(v, p)| v * p / total).sum();
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if mean.abs() > 1e-12 * max_abs.max(1.0) {
            return Err(Error::Spec(format!("coefficient law has nonzero mean {mean:e}")));
        }
        let var: f64 = values.iter().zip(probs).map(|(v, p)| (v - mean).powi(2) * p / total).sum();
        if !(var > 0.0) {
            return Err(Error::Spec("coefficient law has zero variance and cannot be normalized".into()));
        }
        let off = 0.5 / var.sqrt();
        let diag = 1.0 / var.sqrt();
        let support = |s: f64| values.iter().zip(probs).map(|(v, p)| (v * s, p / total)).collect();
        Ok(Some((support(off), support(diag))))
    }
}

/// Truncation level schedule `n ↦ η_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EtaSchedule {
    /// `η_n = n^exponent`.
    Power { exponent: f64 },
    Constant { value: f64 },
}

impl Default for EtaSchedule {
    fn default() -> Self {
        EtaSchedule::Power { exponent: -0.125 }
    }
}

impl EtaSchedule {
    pub fn eta(&self, n: usize) -> f64 {
        match *self {
            EtaSchedule::Power { exponent } => (n as f64).powf(exponent),
            EtaSchedule::Constant { value } => value,
        }
    }
}

fn default_diagonal_bound() -> f64 {
    4.0
}

/// Everything needed to reproduce one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub distribution: EntryLaw,
    pub seed: u64,
    #[serde(default)]
    pub eta: EtaSchedule,
    /// Bound `M` on the diagonal second moment.
    #[serde(default = "default_diagonal_bound")]
    pub diagonal_bound: f64,
}

impl EnsembleSpec {
    pub fn new(n: usize, distribution: EntryLaw, seed: u64) -> Self {
        Self {
            n,
            distribution,
            seed,
            eta: EtaSchedule::default(),
            diagonal_bound: default_diagonal_bound(),
        }
    }

    pub fn gse(n: usize, seed: u64) -> Self {
        Self::new(n, EntryLaw::Gse, seed)
    }

    pub fn with_eta(mut self, eta: EtaSchedule) -> Self {
        self.eta = eta;
        self
    }

    pub fn eta_n(&self) -> f64 {
        self.eta.eta(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Spec("dimension must be at least 1".into()));
        }
        self.distribution.validate()?;
        // Every built-in law normalizes the diagonal second moment to 1.
        if !(self.diagonal_bound > 1.0) {
            return Err(Error::Spec(format!(
                "diagonal second moment 1 is not below the bound M = {}",
                self.diagonal_bound
            )));
        }
        let eta = self.eta_n();
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::Spec(format!("truncation level η_n = {eta} must be positive")));
        }
        Ok(())
    }
}

/// Per-entry sampler for one law.
pub(crate) enum EntrySampler {
    Gse { off: Normal<f64> },
    Rademacher,
    Uniform { off: Uniform<f64>, diag: Uniform<f64> },
    Discrete { off: Vec<(f64, f64)>, diag: Vec<(f64, f64)> },
}

fn pick(support: &[(f64, f64)], rng: &mut Rng) -> f64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(v, p) in support {
        acc += p;
        if u < acc {
            return v;
        }
    }
    support.last().map(|&(v, _)| v).unwrap_or(0.0)
}

impl EntrySampler {
    pub(crate) fn new(law: &EntryLaw) -> Result<Self> {
        Ok(match law {
            EntryLaw::Gse => EntrySampler::Gse {
                off: Normal::new(0.0, 0.5).expect("valid normal"),
            },
            EntryLaw::Rademacher => EntrySampler::Rademacher,
            EntryLaw::Uniform => {
                let h = 3f64.sqrt();
                EntrySampler::Uniform {
                    off: Uniform::new_inclusive(-h / 2.0, h / 2.0).expect("valid range"),
                    diag: Uniform::new_inclusive(-h, h).expect("valid range"),
                }
            }
            EntryLaw::Discrete { .. } => {
                let (off, diag) = law.discrete_support()?.expect("discrete law");
                EntrySampler::Discrete { off, diag }
            }
        })
    }

    pub(crate) fn off_diagonal(&self, rng: &mut Rng) -> Quaternion {
        let mut coeff = || match self {
            EntrySampler::Gse { off } => off.sample(rng),
            EntrySampler::Rademacher => {
                if rng.random::<bool>() {
                    0.5
                } else {
                    -0.5
                }
            }
            EntrySampler::Uniform { off, .. } => off.sample(rng),
            EntrySampler::Discrete { off, .. } => pick(off, rng),
        };
        let (a, b, c, d) = (coeff(), coeff(), coeff(), coeff());
        Quaternion::new(a, b, c, d)
    }

    pub(crate) fn diagonal(&self, rng: &mut Rng) -> Quaternion {
        let a = match self {
            EntrySampler::Gse { .. } => rng.sample(rand_distr::StandardNormal),
            EntrySampler::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntrySampler::Uniform { diag, .. } => diag.sample(rng),
            EntrySampler::Discrete { diag, .. } => pick(diag, rng),
        };
        Quaternion::real(a)
    }
}

/// GSE draw: off-diagonal coefficients N(0, 1/4), diagonal N(0, 1), scaled by `1/√n`.
pub fn sample_gse(n: usize, seed: u64) -> Result<SelfDualMatrix> {
    sample_general(&EnsembleSpec::gse(n, seed))
}

/// Draws a matrix from `spec`. Entries are generated row by row over the
/// upper triangle from a single ChaCha stream seeded with `spec.seed`.
pub fn sample_general(spec: &EnsembleSpec) -> Result<SelfDualMatrix> {
    spec.validate()?;
    let sampler = EntrySampler::new(&spec.distribution)?;
    let mut rng = rng_from_seed(spec.seed);
    let n = spec.n;
    SelfDualMatrix::from_upper_fn(n, 1.0 / (n as f64).sqrt(), |j, k| {
        if j == k {
            sampler.diagonal(&mut rng)
        } else {
            sampler.off_diagonal(&mut rng)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_layout_covers_upper_triangle() {
        let n = 5;
        let mut seen = vec![false; n * (n + 1) / 2];
        for j in 0..n {
            for k in j..n {
                let i = packed_index(n, j, k);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn self_dual_symmetry() {
        let w = sample_gse(6, 9).unwrap();
        assert!(w.is_valid());
        for j in 0..6 {
            assert!(w.raw(j, j).is_real());
            for k in 0..6 {
                assert_eq!(w.raw(k, j), w.raw(j, k).conj());
            }
        }
        assert_eq!(w.scale(), 1.0 / 6f64.sqrt());
    }

    #[test]
    fn single_entry_gse_is_real() {
        let w = sample_gse(1, 4).unwrap();
        assert!(w.raw(0, 0).is_real());
        assert!(w.raw(0, 0).a != 0.0);
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_gse(17, 123).unwrap(), sample_gse(17, 123).unwrap());
        assert_ne!(sample_gse(17, 123).unwrap(), sample_gse(17, 124).unwrap());
    }

    #[test]
    fn rademacher_entries_have_unit_norm() {
        let w = sample_general(&EnsembleSpec::new(8, EntryLaw::Rademacher, 2)).unwrap();
        for (_, _, q) in w.off_diagonal() {
            assert_eq!(q.norm_sqr(), 1.0);
        }
        for j in 0..8 {
            assert_eq!(w.raw(j, j).a.abs(), 1.0);
        }
    }

    #[test]
    fn nonzero_mean_law_is_rejected() {
        let law = EntryLaw::Discrete {
            values: vec![1.0, 2.0],
            probs: vec![0.5, 0.5],
        };
        let spec = EnsembleSpec::new(4, law, 1);
        assert!(matches!(sample_general(&spec), Err(Error::Spec(_))));
        let degenerate = EntryLaw::Discrete {
            values: vec![0.0],
            probs: vec![1.0],
        };
        assert!(degenerate.validate().is_err());
    }

    #[test]
    fn without_removes_row_and_column() {
        let w = sample_gse(4, 5).unwrap();
        let m = w.without(1);
        assert_eq!(m.n(), 3);
        assert_eq!(m.raw(0, 1), w.raw(0, 2));
        assert_eq!(m.raw(2, 1), w.raw(3, 2));
        assert_eq!(m.scale(), w.scale());
    }

    #[test]
    fn spec_json_shape() {
        let spec = EnsembleSpec::gse(10, 3);
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["distribution"]["kind"], "gse");
        assert_eq!(json["eta"]["kind"], "power");
        assert_eq!(json["eta"]["exponent"], -0.125);
        let parsed: EnsembleSpec = serde_json::from_str(
            r#"{"n": 4, "seed": 1, "distribution": {"kind": "discrete",
                "params": {"values": [-1, 3], "probs": [0.75, 0.25]}}}"#,
        )
        .unwrap();
        assert_eq!(parsed.eta, EtaSchedule::default());
        assert!(parsed.validate().is_ok());
    }
}
