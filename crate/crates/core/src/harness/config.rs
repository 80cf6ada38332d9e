use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Lemma1,
    ResolventStructure,
    TraceMinor,
    LevyBounds,
    RankBounds,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Lemma1,
        Check::ResolventStructure,
        Check::TraceMinor,
        Check::LevyBounds,
        Check::RankBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Lemma1 => "lemma1",
            Check::ResolventStructure => "resolvent_structure",
            Check::TraceMinor => "trace_minor",
            Check::LevyBounds => "levy_bounds",
            Check::RankBounds => "rank_bounds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    /// Destination file; standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
    /// Write one histogram CSV per `(n, trial)` next to `path`.
    pub histograms: bool,
    pub histogram_bins: usize,
    /// Record per-trial wall time. Off by default so reruns are byte-identical.
    pub wall_time: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: Format::Csv,
            histograms: false,
            histogram_bins: 40,
            wall_time: false,
        }
    }
}

/// Settings of the `verify` suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    /// Structural tolerance, relative to the largest entry of each matrix.
    pub tol: f64,
    /// Block dimensions `1..=lemma1_max_n` are checked.
    pub lemma1_max_n: usize,
    pub lemma1_trials: usize,
    /// Dimensions of the resolvent, trace-minor and pipeline draws.
    pub sizes: Vec<usize>,
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            lemma1_max_n: 8,
            lemma1_trials: 125,
            sizes: vec![10, 30],
            trials: 3,
        }
    }
}

fn default_ensemble() -> EnsembleSpec {
    EnsembleSpec::gse(200, 20240601)
}

fn default_z_grid() -> Vec<Complex64> {
    vec![
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-1.0, 1.0),
    ]
}

/// A Monte Carlo experiment. Every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Entry law, base seed and truncation schedule. `ensemble.n` is the
    /// dimension used by `sample` and `pipeline`; sweeps use `sizes`.
    pub ensemble: EnsembleSpec,
    pub sizes: Vec<usize>,
    pub trials_per_size: usize,
    /// Spectral parameters, serialized as `[re, im]`.
    pub z_grid: Vec<Complex64>,
    /// Run truncation, centralization and rescaling before the spectrum.
    pub pipeline: bool,
    pub checks: BTreeSet<Check>,
    /// Per-trial checks in a sweep are skipped above this dimension.
    pub check_max_n: usize,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
    /// Worker threads; all available cores when absent.
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ensemble: default_ensemble(),
            sizes: vec![50, 200, 800],
            trials_per_size: 10,
            z_grid: default_z_grid(),
            pipeline: false,
            checks: Check::ALL.into_iter().collect(),
            check_max_n: 64,
            output: OutputConfig::default(),
            verify: VerifyConfig::default(),
            jobs: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn seed(&self) -> u64 {
        self.ensemble.seed
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("sizes must not be empty".into()));
        }
        if self.sizes[0] == 0 || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "sizes must be positive and strictly increasing, got {:?}",
                self.sizes
            )));
        }
        if self.trials_per_size == 0 {
            return Err(Error::Config("trials_per_size must be at least 1".into()));
        }
        if let Some(z) = self.z_grid.iter().find(|z| !(z.im > 0.0) || !z.re.is_finite()) {
            return Err(Error::Config(format!("z = {z} is not in the upper half-plane")));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.output.histogram_bins == 0 {
            return Err(Error::Config("histogram_bins must be at least 1".into()));
        }
        let v = &self.verify;
        if !(v.tol >= 0.0) || v.lemma1_max_n == 0 || v.lemma1_trials == 0 || v.trials == 0 {
            return Err(Error::Config("verify needs tol ≥ 0 and positive counts".into()));
        }
        if v.sizes.contains(&0) {
            return Err(Error::Config("verify sizes must be positive".into()));
        }
        let mut probe = self.ensemble.clone();
        probe.n = self.sizes[0];
        probe.validate()?;
        Ok(())
    }

    /// The ensemble at dimension `n` with the given seed.
    pub fn spec_for(&self, n: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            n,
            seed,
            ..self.ensemble.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.z_grid.len(), 4);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(ExperimentConfig::from_json(r#"{"sizes": [50, 50]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"sizes": []}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"z_grid": [[0.0, 0.0]]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"jobs": 0}"#).is_err());
    }

    #[test]
    fn parses_checks_and_format() {
        let cfg = ExperimentConfig::from_json(
            r#"{"checks": ["lemma1"], "output": {"format": "json"},
                "ensemble": {"n": 10, "seed": 3, "distribution": {"kind": "rademacher"}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.checks.len(), 1);
        assert_eq!(cfg.output.format, Format::Json);
        assert_eq!(cfg.seed(), 3);
    }
}
