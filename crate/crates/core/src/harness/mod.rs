//! Seeded Monte Carlo sweeps and the aggregated verification suite.
//!
//! Trial `t` at dimension `n` draws from seed `derive_seed(config seed, [n, t])`,
//! so adding sizes or trials never changes existing rows. Trials run on a
//! rayon pool and rows come back ordered by `(n, trial)`.

mod config;
mod emit;
mod verify;

pub use config::{Check, ExperimentConfig, Format, OutputConfig, VerifyConfig};
pub use emit::{emit, histogram_path, read_json_rows, write_csv, write_json};
pub use verify::{verify, CheckResult, VerifyReport};

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{run_pipeline, sample_general, PipelineTrace};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::spectra::{
    empirical_stieltjes, kolmogorov_semicircle, levy_distance, pipeline_inequalities,
    resolvent_structure_check, semicircle_stieltjes, trace_minor_check, Histogram, Semicircle,
    SpectralSample,
};

/// Seed of trial `trial` at dimension `n`.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    derive_seed(base, &[n as u64, trial as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StieltjesError {
    pub z: Complex64,
    pub empirical: Complex64,
    pub reference: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub truncated_count: usize,
    pub rank_bound: f64,
    /// Levy-cube bounds of the four stage transitions.
    pub levy_cube_bounds: [f64; 4],
    pub centering_shift_norm: f64,
    pub replaced: usize,
}

impl From<&PipelineTrace> for PipelineSummary {
    fn from(t: &PipelineTrace) -> Self {
        Self {
            truncated_count: t.truncation.truncated_count,
            rank_bound: t.truncation.rank_bound,
            levy_cube_bounds: [
                t.truncation.levy_cube_bound,
                t.diagonal.levy_cube_bound,
                t.centering.levy_cube_bound,
                t.rescale.levy_cube_bound,
            ],
            centering_shift_norm: t.centering.shift_norm,
            replaced: t.rescale.replaced,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    #[serde(with = "nan_as_null")]
    pub kolmogorov: f64,
    #[serde(with = "nan_as_null")]
    pub levy: f64,
    /// One entry per grid point; empty when the trial failed.
    pub stieltjes: Vec<StieltjesError>,
    #[serde(with = "nan_as_null")]
    pub pairing_residual: f64,
    pub pipeline: Option<PipelineSummary>,
    pub checks: Vec<CheckOutcome>,
    /// Set when the trial failed; the numeric fields are then NaN (`null` in JSON).
    pub error: Option<String>,
    pub wall_time: Option<f64>,
}

impl ConvergenceRow {
    pub fn checks_passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

/// Rows plus the optional histograms, ordered by `(n, trial)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<ConvergenceRow>,
    pub histograms: Vec<(usize, usize, Histogram)>,
}

struct TrialOutput {
    row: ConvergenceRow,
    histogram: Option<Histogram>,
}

fn run_trial_inner(
    cfg: &ExperimentConfig,
    n: usize,
    seed: u64,
    row: &mut ConvergenceRow,
) -> Result<Option<Histogram>> {
    let spec = cfg.spec_for(n, seed);
    let (w, stages) = if cfg.pipeline {
        let (trace, stages) = run_pipeline(&spec)?;
        row.pipeline = Some(PipelineSummary::from(&trace));
        (stages.rescaled.clone(), Some((trace, stages)))
    } else {
        (sample_general(&spec)?, None)
    };
    let sample = SpectralSample::from_matrix(&w)?;
    let esd = sample.esd();
    row.pairing_residual = sample.pairing_residual;
    row.kolmogorov = kolmogorov_semicircle(&esd, 1.0);
    row.levy = levy_distance(&esd, &Semicircle::default());
    for &z in &cfg.z_grid {
        let empirical = empirical_stieltjes(&sample, z)?.value;
        let reference = semicircle_stieltjes(z)?;
        row.stieltjes.push(StieltjesError {
            z,
            empirical,
            reference,
            error: (empirical - reference).norm(),
        });
    }

    if n <= cfg.check_max_n {
        let tol = cfg.verify.tol;
        let mut inequalities = None;
        for &check in &cfg.checks {
            let outcome = match check {
                Check::Lemma1 => continue,
                Check::ResolventStructure => {
                    let mut passed = true;
                    let mut residual = 0.0f64;
                    for &z in &cfg.z_grid {
                        let rep = resolvent_structure_check(&w, z, tol)?;
                        passed &= rep.passed;
                        residual = residual.max(rep.structure.type_i_residual);
                    }
                    CheckOutcome { check, passed, residual }
                }
                Check::TraceMinor => {
                    let mut passed = true;
                    let mut residual = 0.0f64;
                    for &z in &cfg.z_grid {
                        let rep = trace_minor_check(&w, z)?;
                        passed &= rep.passed;
                        residual = residual.max(rep.max_difference / rep.bound);
                    }
                    CheckOutcome { check, passed, residual }
                }
                Check::LevyBounds | Check::RankBounds => {
                    let Some((trace, stages)) = &stages else { continue };
                    if inequalities.is_none() {
                        inequalities = Some(pipeline_inequalities(stages, trace)?);
                    }
                    let rep = inequalities.as_ref().expect("computed above");
                    if check == Check::LevyBounds {
                        let worst = rep
                            .stages
                            .iter()
                            .map(|s| s.levy.powi(3) - s.levy_cube_bound)
                            .fold(f64::NEG_INFINITY, f64::max);
                        CheckOutcome {
                            check,
                            passed: rep.stages.iter().all(|s| s.holds),
                            residual: worst,
                        }
                    } else {
                        CheckOutcome {
                            check,
                            passed: rep.rank_holds,
                            residual: rep.rank_sup_distance - rep.rank_bound,
                        }
                    }
                }
            };
            row.checks.push(outcome);
        }
    }

    Ok(cfg.output.histograms.then(|| {
        Histogram::new(&sample.eigenvalues_dedup, cfg.output.histogram_bins, -2.5, 2.5, 1.0)
    }))
}

fn run_trial(cfg: &ExperimentConfig, n: usize, trial: usize) -> TrialOutput {
    let start = Instant::now();
    let seed = trial_seed(cfg.seed(), n, trial);
    let mut row = ConvergenceRow {
        n,
        trial,
        seed,
        kolmogorov: f64::NAN,
        levy: f64::NAN,
        stieltjes: Vec::new(),
        pairing_residual: f64::NAN,
        pipeline: None,
        checks: Vec::new(),
        error: None,
        wall_time: None,
    };
    let histogram = match run_trial_inner(cfg, n, seed, &mut row) {
        Ok(h) => h,
        Err(e) => {
            row.error = Some(e.to_string());
            row.kolmogorov = f64::NAN;
            row.levy = f64::NAN;
            row.pairing_residual = f64::NAN;
            row.stieltjes.clear();
            None
        }
    };
    if cfg.output.wall_time {
        row.wall_time = Some(start.elapsed().as_secs_f64());
    }
    TrialOutput { row, histogram }
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Runs every `(n, trial)` of the sweep. Failures inside a trial are stored in
/// its row; only an invalid config is an error.
pub fn run(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.trials_per_size).map(move |t| (n, t)))
        .collect();
    let outputs: Vec<TrialOutput> = with_pool(cfg.jobs, || {
        // Largest dimensions first keeps the pool busy; order is restored below.
        let mut order: Vec<usize> = (0..tasks.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(tasks[i].0));
        let mut done: Vec<(usize, TrialOutput)> = order
            .into_par_iter()
            .map(|i| (i, run_trial(cfg, tasks[i].0, tasks[i].1)))
            .collect();
        done.sort_by_key(|(i, _)| *i);
        done.into_iter().map(|(_, o)| o).collect()
    })?;
    let mut rows = Vec::with_capacity(outputs.len());
    let mut histograms = Vec::new();
    for o in outputs {
        if let Some(h) = o.histogram {
            histograms.push((o.row.n, o.row.trial, h));
        }
        rows.push(o.row);
    }
    Ok(SweepResult { rows, histograms })
}

/// Runs `f` on a pool with `jobs` threads, or on the global pool.
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Median of the finite values, `NaN` when there are none.
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::semicircle_cdf;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            sizes: vec![1, 6],
            trials_per_size: 2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn rows_are_ordered_and_seeded() {
        let res = run(&small_config()).unwrap();
        let keys: Vec<(usize, usize)> = res.rows.iter().map(|r| (r.n, r.trial)).collect();
        assert_eq!(keys, vec![(1, 0), (1, 1), (6, 0), (6, 1)]);
        for r in &res.rows {
            assert_eq!(r.seed, trial_seed(20240601, r.n, r.trial));
            assert!(r.checks_passed(), "{r:?}");
        }
    }

    #[test]
    fn one_atom_row() {
        let cfg = ExperimentConfig {
            sizes: vec![1],
            trials_per_size: 1,
            ..ExperimentConfig::default()
        };
        let row = &run(&cfg).unwrap().rows[0];
        let w = sample_general(&cfg.spec_for(1, row.seed)).unwrap();
        let a = w.entry(0, 0).a;
        let expected = semicircle_cdf(a, 1.0).max(1.0 - semicircle_cdf(a, 1.0));
        assert!((row.kolmogorov - expected).abs() < 1e-15);
    }

    #[test]
    fn median_handles_even_and_nan() {
        assert_eq!(median([3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median([4.0, 1.0, f64::NAN, 2.0, 3.0]), 2.5);
        assert!(median([f64::NAN]).is_nan());
    }
}
