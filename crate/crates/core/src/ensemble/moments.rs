//! Truncated and tail moments of single entries.
//!
//! Closed forms are used whenever the law provides them: for GSE entries
//! `4‖x‖²` is chi-square with four degrees of freedom, Rademacher entries
//! have unit norm, and discrete laws are enumerated exactly. The remaining
//! cases (uniform coefficients cut by a norm ball) fall back to Monte Carlo on
//! a dedicated seed stream.

use serde::{Deserialize, Serialize};

use super::{EnsembleSpec, EntryLaw, EntrySampler};
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::rng::{derive_seed, rng_from_seed, STREAM_LINDEBERG, STREAM_MOMENTS};

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// Largest support size enumerated exactly (the 4-fold product has k⁴ atoms).
const MAX_ENUMERATED_SUPPORT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Analytic,
    MonteCarlo,
}

/// Moments of `x·I(‖x‖ ≤ threshold)` for one off-diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryMoments {
    pub threshold: f64,
    pub mean: Quaternion,
    /// `E‖x‖² I(‖x‖ ≤ threshold)`.
    pub second_moment: f64,
    pub method: MomentMethod,
}

impl EntryMoments {
    /// `E‖x̃ − E x̃‖²`.
    pub fn variance(&self) -> f64 {
        (self.second_moment - self.mean.norm_sqr()).max(0.0)
    }
}

/// `E‖x‖² I(‖x‖ ≥ threshold)` for off-diagonal and diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMoments {
    pub off_diagonal: f64,
    pub diagonal: f64,
}

/// Almost-sure bounds on `‖x‖` for `(off-diagonal, diagonal)` entries, if bounded.
pub fn max_entry_norms(law: &EntryLaw) -> Result<Option<(f64, f64)>> {
    let h = 3f64.sqrt();
    Ok(match law {
        EntryLaw::Gse => None,
        EntryLaw::Rademacher => Some((1.0, 1.0)),
        EntryLaw::Uniform => Some((h, h)),
        EntryLaw::Discrete { .. } => {
            let (off, diag) = law.discrete_support()?.expect("discrete law");
            let max = |s: &[(f64, f64)]| {
                s.iter()
                    .filter(|&&(_, p)| p > 0.0)
                    .fold(0.0f64, |m, &(v, _)| m.max(v.abs()))
            };
            Some((2.0 * max(&off), max(&diag)))
        }
    })
}

/// Visits every atom of the 4-fold product law with its probability.
fn for_each_atom(support: &[(f64, f64)], mut f: impl FnMut(Quaternion, f64)) {
    for &(a, pa) in support {
        for &(b, pb) in support {
            for &(c, pc) in support {
                for &(d, pd) in support {
                    let p = pa * pb * pc * pd;
                    if p > 0.0 {
                        f(Quaternion::new(a, b, c, d), p);
                    }
                }
            }
        }
    }
}

/// `P(χ²₆ ≤ s)`-based closed form of `E‖x‖² I(‖x‖ ≤ t)` for GSE entries.
fn gse_truncated_second_moment(t: f64) -> f64 {
    1.0 - gse_off_tail(t)
}

/// `E‖x‖² I(‖x‖ ≥ t) = e^{−2t²}(1 + 2t² + 2t⁴)` for GSE off-diagonal entries.
fn gse_off_tail(t: f64) -> f64 {
    let t2 = t * t;
    (-2.0 * t2).exp() * (1.0 + 2.0 * t2 + 2.0 * t2 * t2)
}

/// `E a² I(|a| ≥ t)` for `a ~ N(0, 1)`.
fn gaussian_tail(t: f64) -> f64 {
    let phi = (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    2.0 * t * phi + libm::erfc(t / std::f64::consts::SQRT_2)
}

/// `E a² I(|a| ≥ t)` for `a ~ U[−√3, √3]`.
fn uniform_diag_tail(t: f64) -> f64 {
    let h = 3f64.sqrt();
    if t >= h {
        0.0
    } else {
        let t = t.max(0.0);
        (h * h * h - t * t * t) / (3.0 * h)
    }
}

/// Moments of a truncated off-diagonal entry. `seed` feeds the Monte Carlo
/// fallback through its own stream.
pub fn truncated_moments(
    law: &EntryLaw,
    threshold: f64,
    seed: u64,
    mc_samples: usize,
) -> Result<EntryMoments> {
    let analytic = |mean, second_moment| EntryMoments {
        threshold,
        mean,
        second_moment,
        method: MomentMethod::Analytic,
    };
    match law {
        EntryLaw::Gse => Ok(analytic(Quaternion::ZERO, gse_truncated_second_moment(threshold))),
        EntryLaw::Rademacher => Ok(analytic(
            Quaternion::ZERO,
            if threshold >= 1.0 { 1.0 } else { 0.0 },
        )),
        EntryLaw::Uniform => {
            if threshold >= 3f64.sqrt() {
                return Ok(analytic(Quaternion::ZERO, 1.0));
            }
            // The truncation region is symmetric, so the mean vanishes exactly.
            let sampler = EntrySampler::new(law)?;
            let mut rng = rng_from_seed(derive_seed(seed, &[STREAM_MOMENTS]));
            let samples = mc_samples.max(1);
            let mut acc = 0.0;
            for _ in 0..samples {
                let x = sampler.off_diagonal(&mut rng);
                if x.norm() <= threshold {
                    acc += x.norm_sqr();
                }
            }
            Ok(EntryMoments {
                threshold,
                mean: Quaternion::ZERO,
                second_moment: acc / samples as f64,
                method: MomentMethod::MonteCarlo,
            })
        }
        EntryLaw::Discrete { .. } => {
            let (off, _) = law.discrete_support()?.expect("discrete law");
            if off.len() <= MAX_ENUMERATED_SUPPORT {
                let mut mean = Quaternion::ZERO;
                let mut second = 0.0;
                for_each_atom(&off, |x, p| {
                    if x.norm() <= threshold {
                        mean += x.scale(p);
                        second += p * x.norm_sqr();
                    }
                });
                Ok(analytic(mean, second))
            } else {
                let sampler = EntrySampler::new(law)?;
                let mut rng = rng_from_seed(derive_seed(seed, &[STREAM_MOMENTS]));
                let samples = mc_samples.max(1);
                let mut mean = Quaternion::ZERO;
                let mut second = 0.0;
                for _ in 0..samples {
                    let x = sampler.off_diagonal(&mut rng);
                    if x.norm() <= threshold {
                        mean += x;
                        second += x.norm_sqr();
                    }
                }
                let inv = 1.0 / samples as f64;
                Ok(EntryMoments {
                    threshold,
                    mean: mean.scale(inv),
                    second_moment: second * inv,
                    method: MomentMethod::MonteCarlo,
                })
            }
        }
    }
}

/// Tail second moments `E‖x‖² I(‖x‖ ≥ threshold)`.
pub fn lindeberg_tails(
    law: &EntryLaw,
    threshold: f64,
    seed: u64,
    mc_samples: usize,
) -> Result<TailMoments> {
    if let Some((off_max, diag_max)) = max_entry_norms(law)? {
        if threshold > off_max && threshold > diag_max {
            return Ok(TailMoments {
                off_diagonal: 0.0,
                diagonal: 0.0,
            });
        }
    }
    let tails = match law {
        EntryLaw::Gse => TailMoments {
            off_diagonal: gse_off_tail(threshold),
            diagonal: gaussian_tail(threshold),
        },
        EntryLaw::Rademacher => {
            let t = if threshold <= 1.0 { 1.0 } else { 0.0 };
            TailMoments {
                off_diagonal: t,
                diagonal: t,
            }
        }
        EntryLaw::Uniform => {
            let sampler = EntrySampler::new(law)?;
            let mut rng = rng_from_seed(derive_seed(seed, &[STREAM_LINDEBERG]));
            let samples = mc_samples.max(1);
            let mut acc = 0.0;
            for _ in 0..samples {
                let x = sampler.off_diagonal(&mut rng);
                if x.norm() >= threshold {
                    acc += x.norm_sqr();
                }
            }
            TailMoments {
                off_diagonal: acc / samples as f64,
                diagonal: uniform_diag_tail(threshold),
            }
        }
        EntryLaw::Discrete { .. } => {
            let (off, diag) = law.discrete_support()?.expect("discrete law");
            let diagonal = diag
                .iter()
                .filter(|&&(v, _)| v.abs() >= threshold)
                .map(|&(v, p)| p * v * v)
                .sum();
            let off_diagonal = if off.len() <= MAX_ENUMERATED_SUPPORT {
                let mut acc = 0.0;
                for_each_atom(&off, |x, p| {
                    if x.norm() >= threshold {
                        acc += p * x.norm_sqr();
                    }
                });
                acc
            } else {
                let sampler = EntrySampler::new(law)?;
                let mut rng = rng_from_seed(derive_seed(seed, &[STREAM_LINDEBERG]));
                let samples = mc_samples.max(1);
                let mut acc = 0.0;
                for _ in 0..samples {
                    let x = sampler.off_diagonal(&mut rng);
                    if x.norm() >= threshold {
                        acc += x.norm_sqr();
                    }
                }
                acc / samples as f64
            };
            TailMoments {
                off_diagonal,
                diagonal,
            }
        }
    };
    Ok(tails)
}

/// `(1/n²) Σ_jk E‖x_jk‖² I(‖x_jk‖ ≥ η√n)` for the i.i.d. entries of `spec`.
///
/// Only entry-level computations are involved; no matrix is sampled.
pub fn lindeberg_statistic(spec: &EnsembleSpec, eta: f64, mc_samples: usize) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("η must be positive, got {eta}")));
    }
    spec.distribution.validate()?;
    let n = spec.n as f64;
    let tails = lindeberg_tails(&spec.distribution, eta * n.sqrt(), spec.seed, mc_samples)?;
    Ok(((n * n - n) * tails.off_diagonal + n * tails.diagonal) / (n * n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gse_closed_forms_match_limits() {
        assert_eq!(gse_truncated_second_moment(0.0), 0.0);
        assert!((gse_truncated_second_moment(50.0) - 1.0).abs() < 1e-300);
        assert!((gaussian_tail(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gse_tail_matches_radial_quadrature() {
        // ‖x‖ = r has density 8 r³ e^{−2r²} for four N(0, 1/4) coefficients.
        let t = 0.8;
        let steps = 200_000;
        let upper = 8.0;
        let h = (upper - t) / steps as f64;
        let f = |r: f64| r * r * 8.0 * r.powi(3) * (-2.0 * r * r).exp();
        let mut sum = 0.5 * (f(t) + f(upper));
        for i in 1..steps {
            sum += f(t + i as f64 * h);
        }
        let quad = sum * h;
        assert!((quad - gse_off_tail(t)).abs() < 1e-9, "{quad} vs {}", gse_off_tail(t));
    }

    #[test]
    fn uniform_coefficients_have_unit_second_moment() {
        let m = truncated_moments(&EntryLaw::Uniform, 2.0, 0, 10).unwrap();
        assert_eq!(m.second_moment, 1.0);
        assert_eq!(m.method, MomentMethod::Analytic);
        // Each coefficient: ∫ x² dx / √3 over [−√3/2, √3/2] = 1/4.
        let h = 3f64.sqrt() / 2.0;
        let coefficient_var = (2.0 * h.powi(3) / 3.0) / (2.0 * h);
        assert!((4.0 * coefficient_var - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_monte_carlo_is_seeded() {
        let a = truncated_moments(&EntryLaw::Uniform, 1.0, 5, 20_000).unwrap();
        let b = truncated_moments(&EntryLaw::Uniform, 1.0, 5, 20_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.method, MomentMethod::MonteCarlo);
        assert!(a.second_moment > 0.0 && a.second_moment < 1.0);
    }

    #[test]
    fn asymmetric_two_point_truncated_mean() {
        // Coefficient takes 3 w.p. 1/4 and −1 w.p. 3/4: mean 0, variance 3.
        let law = EntryLaw::Discrete {
            values: vec![3.0, -1.0],
            probs: vec![0.25, 0.75],
        };
        // Normalized coefficients: 3s and −s with s = 1/(2√3).
        let s = 0.5 / 3f64.sqrt();
        let (hi, lo) = (3.0 * s, -s);
        // Keep only atoms with no large coefficient: ‖x‖ = 2s ≈ 0.577.
        // The next-smallest atom has norm √(9s² + 3s²) = 1.
        let m = truncated_moments(&law, 0.9, 0, 0).unwrap();
        let p_all_low = 0.75f64.powi(4);
        assert!((m.mean.a - p_all_low * lo).abs() < 1e-15);
        assert!((m.mean.d - p_all_low * lo).abs() < 1e-15);
        assert!((m.second_moment - p_all_low * 4.0 * s * s).abs() < 1e-15);
        let _ = hi;
        // With no truncation the mean is zero.
        let full = truncated_moments(&law, 10.0, 0, 0).unwrap();
        assert!(full.mean.norm() < 1e-15);
        assert!((full.second_moment - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bounded_law_statistic_is_exactly_zero() {
        let spec = EnsembleSpec::new(100, EntryLaw::Uniform, 1);
        // Norm bound √3 < 2, and 0.5·√100 = 5 > 2.
        assert_eq!(lindeberg_statistic(&spec, 0.5, 1000).unwrap(), 0.0);
        let spec = EnsembleSpec::new(17, EntryLaw::Rademacher, 1);
        assert_eq!(lindeberg_statistic(&spec, 0.5, 1000).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_positive_eta() {
        let spec = EnsembleSpec::gse(10, 1);
        assert!(lindeberg_statistic(&spec, 0.0, 10).is_err());
    }
}
