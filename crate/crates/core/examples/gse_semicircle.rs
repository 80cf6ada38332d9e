//! Samples GSE matrices, compares their spectra with the semicircle law and
//! prints a coarse text histogram.
//!
//! cargo run --release --example gse_semicircle -- 400

use std::time::Instant;

use qsc::ensemble::sample_gse;
use qsc::spectra::{kolmogorov_semicircle, levy_distance, Histogram, Semicircle, SpectralSample};

fn main() -> qsc::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let start = Instant::now();
    let w = sample_gse(n, 7)?;
    let sample = SpectralSample::from_matrix(&w)?;
    let elapsed = start.elapsed();
    let esd = sample.esd();

    println!("n = {n}, eigensolve of the {0}x{0} embedding took {elapsed:.2?}", 2 * n);
    println!("pairing residual   {:.2e}", sample.pairing_residual);
    println!("Kolmogorov dist.   {:.4}", kolmogorov_semicircle(&esd, 1.0));
    println!("Levy distance      {:.4}", levy_distance(&esd, &Semicircle::default()));
    let trace: f64 = sample.eigenvalues_full.iter().sum();
    let diag: f64 = (0..n).map(|j| 2.0 * w.entry(j, j).a).sum();
    println!("trace check        {:.2e}", (trace - diag).abs());

    let hist = Histogram::new(&sample.eigenvalues_dedup, 20, -2.5, 2.5, 1.0);
    let total = hist.total() as f64;
    println!("\n   bin center   empirical  semicircle");
    for (i, &c) in hist.counts.iter().enumerate() {
        let (l, r) = (hist.edges[i], hist.edges[i + 1]);
        let density = c as f64 / (total * (r - l));
        let bar = "#".repeat((density * 60.0).round() as usize);
        println!("{:>12.3} {:>10.3} {:>10.3}  {bar}", 0.5 * (l + r), density, hist.overlay[i]);
    }
    Ok(())
}
