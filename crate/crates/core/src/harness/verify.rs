use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_seed, with_pool, Check, ExperimentConfig};
use crate::ensemble::{run_pipeline, sample_general};
use crate::error::Result;
use crate::spectra::{pipeline_inequalities, resolvent_structure_check, trace_minor_check};
use crate::structure::verify_lemma1;

/// Failure descriptions kept per check.
const MAX_DETAILS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    /// Worst residual in the check's own units (relative structural residual,
    /// `|tr R − tr R_k| υ/2`, `L³ − bound`, or sup-distance minus rank bound).
    pub max_residual: f64,
    pub details: Vec<String>,
}

impl CheckResult {
    fn new(check: Check) -> Self {
        Self {
            check,
            passed: true,
            cases: 0,
            failures: 0,
            max_residual: f64::NEG_INFINITY,
            details: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, residual: f64, detail: impl FnOnce() -> String) {
        self.cases += 1;
        self.max_residual = self.max_residual.max(residual);
        if !ok {
            self.passed = false;
            self.failures += 1;
            if self.details.len() < MAX_DETAILS {
                self.details.push(detail());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// One draw's contributions, merged in `(n, trial)` order afterwards.
type DrawOutcome = Vec<(Check, bool, f64, String)>;

fn verify_draw(cfg: &ExperimentConfig, n: usize, trial: usize) -> DrawOutcome {
    let tol = cfg.verify.tol;
    let seed = trial_seed(cfg.seed(), n, trial);
    let spec = cfg.spec_for(n, seed);
    let tag = format!("n={n} trial={trial} seed={seed}");
    let mut out = Vec::new();
    let wants = |c: Check| cfg.checks.contains(&c);
    let fail = |out: &mut DrawOutcome, c: Check, e: crate::Error| {
        out.push((c, false, f64::INFINITY, format!("{tag}: {e}")));
    };

    let needs_pipeline = cfg.pipeline || wants(Check::LevyBounds) || wants(Check::RankBounds);
    let pipeline = if needs_pipeline { Some(run_pipeline(&spec)) } else { None };
    let matrix = if cfg.pipeline {
        match &pipeline {
            Some(Ok((_, stages))) => Ok(stages.rescaled.clone()),
            Some(Err(e)) => Err(crate::Error::Spec(e.to_string())),
            None => unreachable!("pipeline requested"),
        }
    } else {
        sample_general(&spec)
    };

    if wants(Check::ResolventStructure) || wants(Check::TraceMinor) {
        match &matrix {
            Ok(w) => {
                for &z in &cfg.z_grid {
                    if wants(Check::ResolventStructure) {
                        match resolvent_structure_check(w, z, tol) {
                            Ok(r) => out.push((
                                Check::ResolventStructure,
                                r.passed,
                                r.structure.type_i_residual,
                                format!(
                                    "{tag} z={z}: residual {:.3e}, witness {:?}",
                                    r.structure.type_i_residual, r.structure.witness
                                ),
                            )),
                            Err(e) => fail(&mut out, Check::ResolventStructure, e),
                        }
                    }
                    if wants(Check::TraceMinor) {
                        match trace_minor_check(w, z) {
                            Ok(r) => out.push((
                                Check::TraceMinor,
                                r.passed,
                                r.max_difference / r.bound,
                                format!(
                                    "{tag} z={z}: max difference {:.6} > bound {:.6}",
                                    r.max_difference, r.bound
                                ),
                            )),
                            Err(e) => fail(&mut out, Check::TraceMinor, e),
                        }
                    }
                }
            }
            Err(e) => {
                let msg = e.to_string();
                for c in [Check::ResolventStructure, Check::TraceMinor] {
                    if wants(c) {
                        out.push((c, false, f64::INFINITY, format!("{tag}: {msg}")));
                    }
                }
            }
        }
    }

    if wants(Check::LevyBounds) || wants(Check::RankBounds) {
        let report = match pipeline.expect("pipeline computed") {
            Ok((trace, stages)) => pipeline_inequalities(&stages, &trace),
            Err(e) => Err(e),
        };
        match report {
            Ok(rep) => {
                if wants(Check::LevyBounds) {
                    for s in &rep.stages {
                        out.push((
                            Check::LevyBounds,
                            s.holds,
                            s.levy.powi(3) - s.levy_cube_bound,
                            format!(
                                "{tag} {}→{}: L = {:.3e}, L³ bound {:.3e}",
                                s.from, s.to, s.levy, s.levy_cube_bound
                            ),
                        ));
                    }
                }
                if wants(Check::RankBounds) {
                    out.push((
                        Check::RankBounds,
                        rep.rank_holds,
                        rep.rank_sup_distance - rep.rank_bound,
                        format!(
                            "{tag}: sup-distance {:.3e} > rank bound {:.3e}",
                            rep.rank_sup_distance, rep.rank_bound
                        ),
                    ));
                }
            }
            Err(e) => {
                let msg = e.to_string();
                for c in [Check::LevyBounds, Check::RankBounds] {
                    if wants(c) {
                        out.push((c, false, f64::INFINITY, format!("{tag}: {msg}")));
                    }
                }
            }
        }
    }
    out
}

/// Runs every configured check and aggregates pass/fail with residuals.
pub fn verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let v = &cfg.verify;
    let mut results: Vec<CheckResult> = cfg.checks.iter().map(|&c| CheckResult::new(c)).collect();

    let (lemma, draws) = with_pool(cfg.jobs, || {
        let lemma = if cfg.checks.contains(&Check::Lemma1) {
            Some(
                (1..=v.lemma1_max_n)
                    .map(|n| verify_lemma1(n, v.lemma1_trials, cfg.seed(), v.tol))
                    .collect::<Result<Vec<_>>>(),
            )
        } else {
            None
        };
        let tasks: Vec<(usize, usize)> = v
            .sizes
            .iter()
            .flat_map(|&n| (0..v.trials).map(move |t| (n, t)))
            .collect();
        let draws: Vec<DrawOutcome> = tasks
            .par_iter()
            .map(|&(n, t)| verify_draw(cfg, n, t))
            .collect();
        (lemma, draws)
    })?;

    let slot = |results: &mut Vec<CheckResult>, c: Check| -> usize {
        results.iter().position(|r| r.check == c).expect("configured check")
    };
    if let Some(lemma) = lemma {
        let i = slot(&mut results, Check::Lemma1);
        for rep in lemma? {
            let r = &mut results[i];
            r.record(rep.passed(), rep.max_residual.max(rep.zero_first.max_residual), || {
                format!(
                    "n={}: {}/{} passes, t₁=0 variant {}/{} (max residual {:.3e}, witness {:?})",
                    rep.n,
                    rep.passes,
                    rep.trials,
                    rep.zero_first.passes,
                    rep.zero_first.checked,
                    rep.max_residual,
                    rep.worst_witness
                )
            });
            // Count every individual draw as a case.
            r.cases += rep.trials + rep.zero_first.checked - 1;
        }
    }
    for draw in draws {
        for (c, ok, residual, detail) in draw {
            let i = slot(&mut results, c);
            results[i].record(ok, residual, || detail);
        }
    }
    for r in &mut results {
        if r.cases == 0 {
            r.max_residual = 0.0;
        }
    }
    let passed = results.iter().all(|r| r.passed);
    Ok(VerifyReport { passed, checks: results })
}
