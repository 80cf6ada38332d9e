//! Structure of the resolvent (W − z)⁻¹ and the trace bound for principal
//! minors, for several entry laws.
//!
//! cargo run --release --example resolvent_diagnostics -- 40

use qsc::ensemble::{sample_general, EnsembleSpec, EntryLaw};
use qsc::spectra::{resolvent_structure_check, trace_minor_check};
use qsc::Complex64;

fn main() -> qsc::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let zs = [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.1)];
    for law in [EntryLaw::Gse, EntryLaw::Rademacher, EntryLaw::Uniform] {
        let w = sample_general(&EnsembleSpec::new(n, law.clone(), 5))?;
        for z in zs {
            let s = resolvent_structure_check(&w, z, 1e-8)?;
            let t = trace_minor_check(&w, z)?;
            println!(
                "{:<10} z={z:<8} Type-I {:<5}  residual {:.1e}  max |trR − trR_k| {:.4} ≤ {:.1}",
                law.name(),
                s.passed,
                s.structure.type_i_residual,
                t.max_difference,
                t.bound
            );
        }
    }
    Ok(())
}
