use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectralSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StieltjesPoint {
    pub z: Complex64,
    pub value: Complex64,
}

fn check_upper(z: Complex64) -> Result<()> {
    if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Stieltjes transform needs Im z > 0, got {z}")))
    }
}

/// `s(z) = −(z − √(z² − 4))/2` on the branch with `Im s > 0`.
pub fn semicircle_stieltjes(z: Complex64) -> Result<Complex64> {
    check_upper(z)?;
    let r = (z * z - 4.0).sqrt();
    // The two roots multiply to 1, so exactly one lies in the upper half-plane.
    let s1 = -(z - r) * 0.5;
    let s2 = -(z + r) * 0.5;
    Ok(if s1.im >= s2.im { s1 } else { s2 })
}

/// `mean_i 1/(λ_i − z)`.
pub fn stieltjes_of(eigenvalues: &[f64], z: Complex64) -> Result<Complex64> {
    check_upper(z)?;
    if eigenvalues.is_empty() {
        return Err(Error::Domain("empty spectrum".into()));
    }
    let sum: Complex64 = eigenvalues.iter().map(|&l| (l - z).inv()).sum();
    Ok(sum / eigenvalues.len() as f64)
}

/// `(1/2n) Σ 1/(λ_i − z)` over the full embedded spectrum.
pub fn empirical_stieltjes(sample: &SpectralSample, z: Complex64) -> Result<StieltjesPoint> {
    Ok(StieltjesPoint {
        z,
        value: stieltjes_of(&sample.eigenvalues_full, z)?,
    })
}
