//! Truncation, diagonal removal, centralization and rescaling on one draw,
//! with the Levy and rank inequalities checked on the resulting spectra.
//!
//! cargo run --release --example truncation_pipeline -- 120 0.2

use qsc::ensemble::{run_pipeline, EnsembleSpec, EntryLaw, EtaSchedule};
use qsc::spectra::pipeline_inequalities;

fn main() -> qsc::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(120);
    let eta: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.2);

    // Heavy two-point law: a rare large value balanced by a common −1.
    let p = 0.05;
    let law = EntryLaw::Discrete { values: vec![(1.0 - p) / p, -1.0], probs: vec![p, 1.0 - p] };
    let spec = EnsembleSpec::new(n, law, 3).with_eta(EtaSchedule::Constant { value: eta });
    let (trace, stages) = run_pipeline(&spec)?;

    let t = &trace.truncation;
    println!("n = {n}, η = {eta}, threshold η√n = {:.3}", t.threshold);
    println!("truncated: {} pairs, {} diagonal entries, rank ≤ {}", t.truncated_pairs, t.truncated_diagonal, t.rank);
    let c = &trace.centering;
    println!("centering: ‖μ‖ = {:.3e} ≤ {:.3e} ({:?})", c.shift_norm, c.shift_bound, c.method);
    let r = &trace.rescale;
    println!("rescale: σ² = {:.4}, replaced {} ordered pairs", r.variance, r.replaced);
    println!(
        "final: max ‖x‖ = {:.3} ≤ {:.3}, zero diagonal {}",
        trace.final_max_norm, trace.final_entry_bound, trace.final_diagonal_zero
    );

    let rep = pipeline_inequalities(&stages, &trace)?;
    println!("\n{:<28} {:>10} {:>12}", "stage", "L³", "bound");
    for s in &rep.stages {
        println!("{:<28} {:>10.3e} {:>12.3e} {}", format!("{} → {}", s.from, s.to), s.levy.powi(3), s.levy_cube_bound, if s.holds { "ok" } else { "VIOLATED" });
    }
    println!("rank: sup |F − F̃| = {:.4} ≤ {:.4}: {}", rep.rank_sup_distance, rep.rank_bound, rep.rank_holds);
    Ok(())
}
