//! Acceptance suite. Runs without the libtest harness so that the one-line
//! verdict of every criterion is always printed; exits non-zero on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qsc::ensemble::{
    lindeberg_statistic, max_entry_norms, run_pipeline_with, sample_general, EnsembleSpec, EntryLaw,
    EtaSchedule,
};
use qsc::harness::{median, trial_seed, ExperimentConfig};
use qsc::quaternion::Quaternion;
use qsc::spectra::{
    empirical_stieltjes, kolmogorov_semicircle, pipeline_inequalities, resolvent_structure_check,
    semicircle_stieltjes, trace_minor_check, SpectralSample,
};
use qsc::structure::verify_lemma1;

const BASE_SEED: u64 = 0x5EED_0001;

type Verdict = Result<String, String>;

fn check(cond: bool, msg: String) -> Verdict {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn normal_quaternion(rng: &mut ChaCha8Rng, scale: f64) -> Quaternion {
    let mut c = || scale * rng.sample::<f64, _>(StandardNormal);
    Quaternion::new(c(), c(), c(), c())
}

fn laws() -> [(&'static str, EntryLaw); 3] {
    [
        ("gse", EntryLaw::Gse),
        ("rademacher", EntryLaw::Rademacher),
        ("uniform", EntryLaw::Uniform),
    ]
}

/// 1. Inverses of random Type-II matrices are Type-I (block dims 1-8).
fn c1_lemma() -> Verdict {
    let start = Instant::now();
    let tol = 1e-8;
    let mut draws = 0;
    let mut zero_first = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for n in 1..=8 {
        let rep = verify_lemma1(n, 125, BASE_SEED, tol).map_err(|e| e.to_string())?;
        draws += rep.trials;
        zero_first += rep.zero_first.passes;
        worst = worst.max(rep.max_residual).max(rep.zero_first.max_residual);
        if !rep.passed() || rep.zero_first.checked == 0 && n > 1 {
            failures.push(format!("n={n}: {}/{} passes", rep.passes, rep.trials));
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && draws >= 1000 && elapsed <= Duration::from_secs(30),
        format!(
            "{draws} draws + {zero_first} t1=0 variants, max relative residual {worst:.2e} (tol {tol:.0e}), {elapsed:.1?}{}",
            if failures.is_empty() { String::new() } else { format!(", failures {failures:?}") }
        ),
    )
}

/// 2. Homomorphism on 10^4 random pairs and the exact basis table.
fn c2_homomorphism() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut worst_ratio = 0.0f64;
    for _ in 0..10_000 {
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let x = normal_quaternion(&mut rng, scale);
        let y = normal_quaternion(&mut rng, 1.0 / scale);
        let lhs = (x * y).to_complex();
        let rhs = x.to_complex() * y.to_complex();
        let bound = 4.0 * f64::EPSILON * x.norm() * y.norm();
        worst_ratio = worst_ratio.max(lhs.max_abs_diff(&rhs) / bound);
    }
    let (one, i1, i2, i3) = (Quaternion::ONE, Quaternion::I1, Quaternion::I2, Quaternion::I3);
    let table = [
        (i1 * i1, -one),
        (i2 * i2, -one),
        (i3 * i3, -one),
        (i1 * i2, i3),
        (i2 * i1, -i3),
        (i2 * i3, i1),
        (i3 * i2, -i1),
        (i3 * i1, i2),
    ];
    let exact = table.iter().all(|(l, r)| l == r)
        && table.iter().all(|(l, r)| l.to_complex() == r.to_complex())
        && [(i1, i2, i3), (i2, i3, i1), (i3, i1, i2)]
            .iter()
            .all(|(p, q, r)| p.to_complex() * q.to_complex() == r.to_complex());
    check(
        worst_ratio <= 1.0 && exact,
        format!(
            "worst |error| / (4 eps |x||y|) = {worst_ratio:.3} over 10^4 pairs, basis relations exact: {exact}"
        ),
    )
}

/// 3 and 4 share their draws.
fn pairing_and_resolvent() -> (Verdict, Verdict) {
    let mut worst_pair = 0.0f64;
    let mut worst_struct = 0.0f64;
    let mut pair_fail = Vec::new();
    let mut struct_fail = Vec::new();
    let mut draws = 0;
    let zs = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0)];
    for (name, law) in laws() {
        for n in [10, 50, 200] {
            for t in 0..10 {
                draws += 1;
                let spec = EnsembleSpec::new(n, law.clone(), trial_seed(BASE_SEED, n, t));
                let w = sample_general(&spec).expect("valid spec");
                match SpectralSample::from_matrix_tol(&w, 1e-8) {
                    Ok(s) => worst_pair = worst_pair.max(s.pairing_residual),
                    Err(e) => pair_fail.push(format!("{name} n={n} t={t}: {e}")),
                }
                for z in zs {
                    match resolvent_structure_check(&w, z, 1e-8) {
                        Ok(r) => {
                            worst_struct = worst_struct.max(r.structure.type_i_residual);
                            if !r.passed || !r.diagonal_type_t {
                                struct_fail.push(format!("{name} n={n} t={t} z={z}"));
                            }
                        }
                        Err(e) => struct_fail.push(format!("{name} n={n} t={t} z={z}: {e}")),
                    }
                }
            }
        }
    }
    (
        check(
            pair_fail.is_empty(),
            format!("{draws} draws, max pairing residual {worst_pair:.2e} (tol 1e-8) {pair_fail:?}"),
        ),
        check(
            struct_fail.is_empty(),
            format!(
                "{} resolvents, max Type-I residual {worst_struct:.2e} (tol 1e-8) {struct_fail:?}",
                draws * zs.len()
            ),
        ),
    )
}

/// 5. Kolmogorov distance medians over 10 seeds.
fn c5_global_law() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, law) in [("gse", EntryLaw::Gse), ("rademacher", EntryLaw::Rademacher)] {
        let meds: Vec<f64> = [50, 200, 800]
            .iter()
            .map(|&n| {
                median((0..10).map(|t| {
                    let spec = EnsembleSpec::new(n, law.clone(), trial_seed(BASE_SEED, n, t));
                    let w = sample_general(&spec).expect("valid spec");
                    let s = SpectralSample::from_matrix(&w).expect("eigensolve");
                    kolmogorov_semicircle(&s.esd(), 1.0)
                }))
            })
            .collect();
        ok &= meds[1] <= 0.10 && meds[2] <= 0.06 && meds[0] > meds[1] && meds[1] > meds[2];
        parts.push(format!(
            "{name}: {:.4} > {:.4} > {:.4}",
            meds[0], meds[1], meds[2]
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= Duration::from_secs(600);
    check(
        ok,
        format!(
            "median K at n=50/200/800 ({}), limits 0.10 at 200 and 0.06 at 800, {elapsed:.1?}",
            parts.join("; ")
        ),
    )
}

/// 6. Stieltjes transform at z = 2i, fixed point on a grid, positivity.
fn c6_stieltjes() -> Verdict {
    let z = Complex64::new(0.0, 2.0);
    let s = semicircle_stieltjes(z).map_err(|e| e.to_string())?;
    let mut errors = Vec::new();
    let mut positive = true;
    let probe = [z, Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0), Complex64::new(-1.5, 0.01)];
    for t in 0..10 {
        let w = sample_general(&EnsembleSpec::gse(500, trial_seed(BASE_SEED, 500, t))).expect("valid spec");
        let sample = SpectralSample::from_matrix(&w).expect("eigensolve");
        errors.push((empirical_stieltjes(&sample, z).expect("Im z > 0").value - s).norm());
        for zz in probe {
            positive &= empirical_stieltjes(&sample, zz).expect("Im z > 0").value.im > 0.0;
        }
    }
    let mean_err = errors.iter().sum::<f64>() / errors.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED ^ 6);
    let mut worst_fp = 0.0f64;
    for _ in 0..100 {
        let zz = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(0.01..4.0));
        let sz = semicircle_stieltjes(zz).expect("Im z > 0");
        positive &= sz.im > 0.0;
        worst_fp = worst_fp.max((sz + (zz + sz).inv()).norm());
    }
    check(
        mean_err <= 0.05 && worst_fp <= 1e-12 && positive,
        format!(
            "mean |s_n(2i) - s(2i)| = {mean_err:.4} over 10 GSE draws at n=500 (limit 0.05), fixed-point residual {worst_fp:.1e}, Im s > 0: {positive}"
        ),
    )
}

fn random_law(rng: &mut ChaCha8Rng) -> EntryLaw {
    match rng.random_range(0..4) {
        0 => EntryLaw::Gse,
        1 => EntryLaw::Rademacher,
        2 => EntryLaw::Uniform,
        _ => {
            // Two-point law with mean zero: p·v = (1 − p)·1.
            let p = rng.random_range(0.1..0.5);
            EntryLaw::Discrete {
                values: vec![(1.0 - p) / p, -1.0],
                probs: vec![p, 1.0 - p],
            }
        }
    }
}

/// 7. Levy, rank and trace-minor inequalities on 100 random pipeline runs.
fn c7_inequalities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED ^ 7);
    let mut violations = Vec::new();
    let (mut levy_checks, mut rank_checks, mut minor_checks) = (0, 0, 0);
    let mut truncating_runs = 0;
    for run in 0..100 {
        let law = random_law(&mut rng);
        let n = rng.random_range(2..=40);
        let eta = if rng.random_bool(0.5) {
            EtaSchedule::Power { exponent: rng.random_range(-0.6..0.0) }
        } else {
            EtaSchedule::Constant { value: rng.random_range(0.03..0.6) }
        };
        let spec = EnsembleSpec::new(n, law, rng.random()).with_eta(eta);
        let (trace, stages) = match run_pipeline_with(&spec, 100_000) {
            Ok(r) => r,
            Err(e) => {
                violations.push(format!("run {run}: {e}"));
                continue;
            }
        };
        truncating_runs += usize::from(trace.truncation.truncated_count > 0);
        let rep = pipeline_inequalities(&stages, &trace).expect("eigensolves");
        levy_checks += rep.stages.len();
        rank_checks += 1;
        for s in rep.stages.iter().filter(|s| !s.holds) {
            violations.push(format!("run {run} {}->{}: L={} bound={}", s.from, s.to, s.levy, s.levy_cube_bound));
        }
        if !rep.rank_holds {
            violations.push(format!("run {run}: rank {} > {}", rep.rank_sup_distance, rep.rank_bound));
        }
        let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(0.05..2.0));
        for w in stages.as_array() {
            let tm = trace_minor_check(w, z).expect("Im z > 0");
            minor_checks += tm.differences.len();
            if !tm.passed {
                violations.push(format!("run {run}: trace-minor {} > {}", tm.max_difference, tm.bound));
            }
        }
    }
    check(
        violations.is_empty(),
        format!(
            "100 runs ({truncating_runs} truncating): {levy_checks} Levy, {rank_checks} rank, {minor_checks} trace-minor checks, {} violations {violations:?}",
            violations.len()
        ),
    )
}

/// 8. Lindeberg statistic: exact zero for bounded laws, monotone for GSE.
fn c8_lindeberg() -> Verdict {
    let start = Instant::now();
    let eta = 0.5;
    let mut zero = true;
    for law in [
        EntryLaw::Rademacher,
        EntryLaw::Uniform,
        EntryLaw::Discrete { values: vec![-1.0, 0.0, 1.0], probs: vec![0.25, 0.5, 0.25] },
    ] {
        let (off, diag) = max_entry_norms(&law).expect("valid law").expect("bounded law");
        let bound = off.max(diag);
        let n_min = ((bound / eta).powi(2)).floor() as usize + 1;
        for n in [n_min, 10 * n_min, 1000] {
            let n = n.max(n_min);
            let v = lindeberg_statistic(&EnsembleSpec::new(n, law.clone(), 1), eta, 100_000).expect("valid");
            zero &= v == 0.0;
        }
    }
    let gse: Vec<f64> = [100usize, 1_000, 10_000]
        .iter()
        .map(|&n| {
            let spec = EnsembleSpec::gse(n, 1);
            lindeberg_statistic(&spec, spec.eta_n(), 0).expect("valid")
        })
        .collect();
    let decreasing = gse[0] > gse[1] && gse[1] > gse[2];
    let elapsed = start.elapsed();
    check(
        zero && decreasing && elapsed <= Duration::from_secs(10),
        format!(
            "bounded laws exactly 0: {zero}; GSE with eta_n = n^(-1/8): {:.3e} > {:.3e} > {:.3e}; {elapsed:.1?}",
            gse[0], gse[1], gse[2]
        ),
    )
}

/// 9. `qsc sweep` twice on one config gives byte-identical CSV.
fn c9_determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("qsc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig {
        sizes: vec![5, 20, 60],
        trials_per_size: 3,
        pipeline: true,
        ..ExperimentConfig::default()
    };
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "2"].iter().enumerate() {
        let out = dir.join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_qsc"))
            .args(["sweep", "--config"])
            .arg(&cfg_path)
            .args(["--format", "csv", "--jobs", jobs, "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("sweep failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let lines = outputs[0].iter().filter(|&&b| b == b'\n').count();
    check(
        outputs[0] == outputs[1] && lines == 1 + 9,
        format!("two sweeps (--jobs 1 and 2) wrote {} and {} bytes, identical: {}", outputs[0].len(), outputs[1].len(), outputs[0] == outputs[1]),
    )
}

fn guarded(f: impl FnOnce() -> Verdict) -> Verdict {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(p) => Err(format!(
            "panicked: {}",
            p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
        )),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut report = |id: u32, name: &'static str, v: Verdict| {
        match &v {
            Ok(msg) => println!("PASS [{id}] {name}: {msg}"),
            Err(msg) => println!("FAIL [{id}] {name}: {msg}"),
        }
        results.push((id, name, v));
    };
    report(1, "Type-II inverse is Type-I", guarded(c1_lemma));
    report(2, "quaternion embedding homomorphism", guarded(c2_homomorphism));
    let (c3, c4) = match catch_unwind(pairing_and_resolvent) {
        Ok(pair) => pair,
        Err(_) => (Err("panicked".to_string()), Err("panicked".to_string())),
    };
    report(3, "eigenvalue pair degeneracy", c3);
    report(4, "resolvent Type-I structure", c4);
    report(5, "global semicircle law", guarded(c5_global_law));
    report(6, "Stieltjes convergence", guarded(c6_stieltjes));
    report(7, "Levy / rank / trace-minor inequalities", guarded(c7_inequalities));
    report(8, "Lindeberg diagnostic", guarded(c8_lindeberg));
    report(9, "sweep determinism", guarded(c9_determinism));
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
