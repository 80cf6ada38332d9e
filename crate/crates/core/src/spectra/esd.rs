//! Empirical spectral distributions, the semicircle law and the distances
//! between them.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Absolute tolerance of the Levy-distance bisection.
pub const LEVY_TOL: f64 = 1e-6;

/// A distribution function with access to left limits.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// `F(x⁻)`; equal to `cdf` for continuous laws.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

/// Step distribution `F(x) = #{s_i ≤ x} / len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Esd {
    points: Vec<f64>,
}

impl Esd {
    /// Sorts the values; NaNs are not allowed.
    pub fn new(mut values: Vec<f64>) -> Self {
        assert!(values.iter().all(|v| !v.is_nan()), "NaN in spectrum");
        values.sort_by(f64::total_cmp);
        Self { points: values }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distinct jump locations with `(x, F(x⁻), F(x))`.
    pub fn jumps(&self) -> Vec<(f64, f64, f64)> {
        let m = self.points.len() as f64;
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.points.len() {
            let x = self.points[i];
            let mut j = i;
            while j < self.points.len() && self.points[j] == x {
                j += 1;
            }
            out.push((x, i as f64 / m, j as f64 / m));
            i = j;
        }
        out
    }

    /// Writes `x,F(x)` at every distinct jump point.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "x,F")?;
        for (x, _, f) in self.jumps() {
            writeln!(out, "{x},{f}")?;
        }
        Ok(())
    }
}

impl Cdf for Esd {
    fn cdf(&self, x: f64) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.partition_point(|&p| p <= x) as f64 / self.points.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.partition_point(|&p| p < x) as f64 / self.points.len() as f64
    }
}

pub fn semicircle_pdf(x: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    let r2 = 4.0 * sigma * sigma - x * x;
    if r2 <= 0.0 {
        0.0
    } else {
        r2.sqrt() / (2.0 * PI * sigma * sigma)
    }
}

pub fn semicircle_cdf(x: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    let edge = 2.0 * sigma;
    if x <= -edge {
        0.0
    } else if x >= edge {
        1.0
    } else {
        let s2 = sigma * sigma;
        let v = 0.5 + x * (4.0 * s2 - x * x).sqrt() / (4.0 * PI * s2) + (x / edge).asin() / PI;
        v.clamp(0.0, 1.0)
    }
}

/// Semicircle law of scale `sigma` (support `[−2σ, 2σ]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Semicircle {
    pub sigma: f64,
}

impl Default for Semicircle {
    fn default() -> Self {
        Self { sigma: 1.0 }
    }
}

impl Cdf for Semicircle {
    fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf(x, self.sigma)
    }
}

/// `sup_x |F(x) − G(x)|` for a step `F` against a continuous `G`.
pub fn kolmogorov_distance(e: &Esd, g: &impl Cdf) -> f64 {
    e.jumps()
        .into_iter()
        .map(|(x, left, right)| {
            let gx = g.cdf(x);
            (right - gx).abs().max((left - g.cdf_left(x)).abs())
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov distance against the semicircle of scale `sigma`.
pub fn kolmogorov_semicircle(e: &Esd, sigma: f64) -> f64 {
    kolmogorov_distance(e, &Semicircle { sigma })
}

/// `sup_x |F(x) − G(x)|` for two step distributions, exact.
pub fn ks_between(f: &Esd, g: &Esd) -> f64 {
    // Both are constant between merged jump points, so the right values there suffice.
    if f.len() == g.len() && !f.is_empty() {
        // Integer counts so that a gap of k steps is exactly k / len.
        let count = |e: &Esd, x: f64| e.points.partition_point(|&p| p <= x) as i64;
        let k = f
            .points()
            .iter()
            .chain(g.points())
            .map(|&x| (count(f, x) - count(g, x)).unsigned_abs())
            .max()
            .unwrap_or(0);
        return k as f64 / f.len() as f64;
    }
    f.points()
        .iter()
        .chain(g.points())
        .map(|&x| (f.cdf(x) - g.cdf(x)).abs())
        .fold(0.0, f64::max)
}

/// Whether `G(x − ε) − ε ≤ F(x) ≤ G(x + ε) + ε` holds for every real `x`.
///
/// Exact for a step `F`: the left inequality is tightest just before each
/// jump of `F`, the right one at each jump.
pub fn levy_feasible(f: &Esd, g: &impl Cdf, eps: f64) -> bool {
    f.jumps().into_iter().all(|(x, left, right)| {
        g.cdf_left(x - eps) - eps <= left && right <= g.cdf(x + eps) + eps
    })
}

/// Levy distance between a step `F` and any distribution `G`, as the upper
/// end of a bisection bracket of width [`LEVY_TOL`].
pub fn levy_distance(f: &Esd, g: &impl Cdf) -> f64 {
    levy_distance_tol(f, g, LEVY_TOL)
}

pub fn levy_distance_tol(f: &Esd, g: &impl Cdf, tol: f64) -> f64 {
    if levy_feasible(f, g, 0.0) {
        return 0.0;
    }
    // ε = 1 is always feasible for distribution functions.
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if levy_feasible(f, g, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Histogram with semicircle overlay values at bin centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Semicircle density at each bin center.
    pub overlay: Vec<f64>,
}

impl Histogram {
    /// `bins` equal-width bins on `[lo, hi]`; values outside are clamped into
    /// the end bins so the counts sum to the sample size.
    pub fn new(values: &[f64], bins: usize, lo: f64, hi: f64, sigma: f64) -> Self {
        assert!(bins > 0 && hi > lo);
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let idx = ((v - lo) / width).floor();
            let idx = if idx < 0.0 { 0 } else { (idx as usize).min(bins - 1) };
            counts[idx] += 1;
        }
        let overlay = (0..bins)
            .map(|i| semicircle_pdf(lo + (i as f64 + 0.5) * width, sigma))
            .collect();
        Self { edges, counts, overlay }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Columns `left,right,count,density,semicircle`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let total = self.total().max(1) as f64;
        writeln!(out, "left,right,count,density,semicircle")?;
        for (i, &c) in self.counts.iter().enumerate() {
            let (l, r) = (self.edges[i], self.edges[i + 1]);
            writeln!(out, "{l},{r},{c},{},{}", c as f64 / (total * (r - l)), self.overlay[i])?;
        }
        Ok(())
    }
}
