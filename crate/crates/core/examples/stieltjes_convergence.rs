//! Empirical Stieltjes transforms of GSE spectra approaching the semicircle
//! transform as n grows.
//!
//! cargo run --release --example stieltjes_convergence

use qsc::ensemble::sample_gse;
use qsc::spectra::{empirical_stieltjes, semicircle_stieltjes, SpectralSample};
use qsc::Complex64;

fn main() -> qsc::Result<()> {
    let zs = [
        Complex64::new(0.0, 2.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(1.5, 0.2),
        Complex64::new(-1.0, 1.0),
    ];
    print!("{:>6}", "n");
    for z in zs {
        print!("  {:>16}", format!("|Δs({z})|"));
    }
    println!();
    for n in [25, 50, 100, 200, 400] {
        let sample = SpectralSample::from_matrix(&sample_gse(n, 11)?)?;
        print!("{n:>6}");
        for z in zs {
            let err = (empirical_stieltjes(&sample, z)?.value - semicircle_stieltjes(z)?).norm();
            print!("  {err:>16.5}");
        }
        println!();
    }
    let z = zs[0];
    let s = semicircle_stieltjes(z)?;
    println!("\ns({z}) = {s:.6}, fixed-point residual |s + 1/(z + s)| = {:.1e}", (s + (z + s).inv()).norm());
    Ok(())
}
