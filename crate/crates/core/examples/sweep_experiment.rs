//! A small convergence sweep through the harness, written as CSV to stdout
//! with a per-size summary on stderr.
//!
//! cargo run --release --example sweep_experiment > sweep.csv

use qsc::ensemble::{EnsembleSpec, EntryLaw};
use qsc::harness::{median, run, write_csv, ExperimentConfig};

fn main() -> qsc::Result<()> {
    let cfg = ExperimentConfig {
        ensemble: EnsembleSpec::new(100, EntryLaw::Uniform, 2024),
        sizes: vec![25, 50, 100, 200],
        trials_per_size: 4,
        pipeline: true,
        ..ExperimentConfig::default()
    };
    let result = run(&cfg)?;
    write_csv(&result.rows, std::io::stdout().lock())?;
    for &n in &cfg.sizes {
        let k = median(result.rows.iter().filter(|r| r.n == n).map(|r| r.kolmogorov));
        eprintln!("n={n:>4}  median Kolmogorov {k:.4}");
    }
    Ok(())
}
