//! Block patterns of 2n×2n complex matrices.
//!
//! A Type-T block is `t·I₂`. In a Type-I matrix every diagonal block is
//! Type-T and every off-diagonal pair satisfies the d-relation
//! `B_kj = [[p₂₂, -p₁₂], [-p₂₁, p₁₁]]` where `p = B_jk`. In a Type-II matrix
//! the off-diagonal block `B_jk` is written as `A + B·i` with `A`, `B` of the
//! quaternion shape `[[a, b], [-b̄, ā]]` (complex `a, b`) and its partner must
//! equal `A* + B*·i` (the u-relation). The shifted complex embedding
//! `W − zI` of a self-dual matrix is Type-II and its inverse is Type-I.
//!
//! Predicates on single blocks take absolute tolerances. [`classify`] scales
//! its tolerance by the largest entry modulus of the matrix under test.

mod block;

pub use block::BlockMatrix;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quaternion::Complex2x2;
use crate::rng::{derive_seed, rng_from_seed, Rng};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative threshold on the smallest singular value used by
/// [`schur_block_inverse`].
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// Deviation of a 2×2 block from `t·I₂`.
pub fn type_t_residual(b: &Complex2x2) -> f64 {
    b.get(0, 1)
        .norm()
        .max(b.get(1, 0).norm())
        .max((b.get(0, 0) - b.get(1, 1)).norm())
}

pub fn is_type_t(b: &Complex2x2, tol: f64) -> bool {
    type_t_residual(b) <= tol
}

/// Entrywise deviation of `q` from the d-partner `[[p₂₂, -p₁₂], [-p₂₁, p₁₁]]` of `p`.
pub fn d_residual(p: &Complex2x2, q: &Complex2x2) -> f64 {
    q.max_abs_diff(&p.adjugate())
}

pub fn d_related(p: &Complex2x2, q: &Complex2x2, tol: f64) -> bool {
    d_residual(p, q) <= tol
}

/// Splits `p` as `A + B·i` with `A = [[a, b], [-b̄, ā]]` and
/// `B = [[c, d], [-d̄, c̄]]` (complex `a, b, c, d`).
///
/// The split is unique: the pattern has eight real degrees of freedom, as
/// many as a 2×2 complex block, so every finite block decomposes.
pub fn u_decompose(p: &Complex2x2) -> Result<(Complex2x2, Complex2x2)> {
    if p.0.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Decomposition(format!("non-finite entries in {:?}", p.0)));
    }
    let (p11, p12, p21, p22) = (p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1));
    let a = (p11 + p22.conj()) * 0.5;
    let c = (p11 - p22.conj()) / (2.0 * I);
    let b = (p12 - p21.conj()) * 0.5;
    let d = (p12 + p21.conj()) / (2.0 * I);
    Ok((quaternion_shaped(a, b), quaternion_shaped(c, d)))
}

/// `[[x, y], [-ȳ, x̄]]`.
fn quaternion_shaped(x: Complex64, y: Complex64) -> Complex2x2 {
    Complex2x2::new(x, y, -y.conj(), x.conj())
}

/// The u-partner `A* + B*·i` of `p = A + B·i`.
pub fn u_partner(p: &Complex2x2) -> Result<Complex2x2> {
    let (a, b) = u_decompose(p)?;
    Ok(a.adjoint() + b.adjoint().scale(I))
}

pub fn u_residual(p: &Complex2x2, q: &Complex2x2) -> Result<f64> {
    Ok(q.max_abs_diff(&u_partner(p)?))
}

pub fn u_related(p: &Complex2x2, q: &Complex2x2, tol: f64) -> Result<bool> {
    Ok(u_residual(p, q)? <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureClass {
    /// Diagonal blocks are Type-T but the off-diagonal pairs fit neither relation.
    TypeTDiagonalOnly,
    TypeI,
    TypeII,
    None,
}

/// Location of the worst structural deviation, zero-based block indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub j: usize,
    pub k: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Strongest passing class, Type-II taking precedence over Type-I.
    pub classification: StructureClass,
    /// Every class whose identities hold within tolerance.
    pub classes: Vec<StructureClass>,
    /// Relative residual of the reported classification (of the diagonal
    /// Type-T test when nothing passes).
    pub max_residual: f64,
    pub diagonal_residual: f64,
    pub type_i_residual: f64,
    pub type_ii_residual: f64,
    /// Largest entry modulus; residuals above are divided by it.
    pub scale: f64,
    pub tol: f64,
    pub witness: Option<Witness>,
}

impl StructureReport {
    pub fn satisfies(&self, class: StructureClass) -> bool {
        self.classes.contains(&class)
    }
}

pub fn classify(m: &BlockMatrix, tol: f64) -> StructureReport {
    let n = m.n();
    let scale = match m.max_block_norm() {
        s if s > 0.0 && s.is_finite() => s,
        _ => 1.0,
    };
    let mut diag = 0.0f64;
    let mut d_res = 0.0f64;
    let mut u_res = 0.0f64;
    let mut witness: Option<Witness> = None;
    let mut note = |j: usize, k: usize, r: f64| {
        if r > 0.0 && witness.is_none_or(|w| r > w.residual) {
            witness = Some(Witness { j, k, residual: r });
        }
    };
    for j in 0..n {
        let r = type_t_residual(&m.block(j, j)) / scale;
        diag = diag.max(r);
        note(j, j, r);
        for k in j + 1..n {
            let p = m.block(j, k);
            let q = m.block(k, j);
            let rd = d_residual(&p, &q) / scale;
            let ru = u_residual(&p, &q).unwrap_or(f64::INFINITY) / scale;
            d_res = d_res.max(rd);
            u_res = u_res.max(ru);
            note(j, k, rd.max(ru));
        }
    }
    let type_i = diag.max(d_res);
    let type_ii = diag.max(u_res);

    let mut classes = Vec::new();
    if diag <= tol {
        classes.push(StructureClass::TypeTDiagonalOnly);
    }
    if type_i <= tol {
        classes.push(StructureClass::TypeI);
    }
    if type_ii <= tol {
        classes.push(StructureClass::TypeII);
    }
    let (classification, max_residual) = if type_ii <= tol {
        (StructureClass::TypeII, type_ii)
    } else if type_i <= tol {
        (StructureClass::TypeI, type_i)
    } else if diag <= tol {
        (StructureClass::TypeTDiagonalOnly, diag)
    } else {
        (StructureClass::None, diag)
    };
    if classes.iter().any(|c| matches!(c, StructureClass::TypeI | StructureClass::TypeII)) {
        classes.retain(|c| *c != StructureClass::TypeTDiagonalOnly);
    }
    StructureReport {
        classification,
        classes,
        max_residual,
        diagonal_residual: diag,
        type_i_residual: type_i,
        type_ii_residual: type_ii,
        scale,
        tol,
        witness,
    }
}

/// Builds a Type-II matrix from its diagonal scalars `t` and, for each
/// `j < k`, the complex coefficients `[a, b, c, d]` of block `(j, k)`.
pub fn make_type_two(
    t: &[Complex64],
    mut coeffs: impl FnMut(usize, usize) -> [Complex64; 4],
) -> BlockMatrix {
    let n = t.len();
    let mut m = BlockMatrix::zeros(n);
    for (j, &tj) in t.iter().enumerate() {
        m.set_block(j, j, &Complex2x2::scalar(tj));
        for k in j + 1..n {
            let [a, b, c, d] = coeffs(j, k);
            let (qa, qb) = (quaternion_shaped(a, b), quaternion_shaped(c, d));
            m.set_block(j, k, &(qa + qb.scale(I)));
            m.set_block(k, j, &(qa.adjoint() + qb.adjoint().scale(I)));
        }
    }
    m
}

fn complex_normal(rng: &mut Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random Type-II matrix: `t_j` complex standard normal shifted by `+i`,
/// off-diagonal coefficients complex standard normal.
pub fn sample_type_two(n: usize, rng: &mut Rng) -> BlockMatrix {
    let t: Vec<Complex64> = (0..n).map(|_| complex_normal(rng) + I).collect();
    let coeffs: Vec<[Complex64; 4]> = (0..n * n.saturating_sub(1) / 2)
        .map(|_| std::array::from_fn(|_| complex_normal(rng)))
        .collect();
    let mut idx = 0;
    make_type_two(&t, |_, _| {
        idx += 1;
        coeffs[idx - 1]
    })
}

/// Inverse assembled from the Schur complement of the leading
/// `split × split` block submatrix.
pub fn schur_block_inverse(m: &BlockMatrix, split: usize) -> Result<BlockMatrix> {
    let n = m.n();
    if split == 0 || split > n {
        return Err(Error::Domain(format!(
            "split {split} outside 1..={n} for a {n}-block matrix"
        )));
    }
    let dense = m.dense();
    let s = 2 * split;
    let dim = 2 * n;
    let threshold = SINGULAR_REL_TOL * dense.frobenius_norm();
    let check = |what: &'static str, a: &CMatrix| -> Result<CMatrix> {
        let sigma_min = a.min_singular_value();
        if !(sigma_min >= threshold) || sigma_min == 0.0 {
            return Err(Error::Singular {
                what,
                sigma_min,
                threshold,
            });
        }
        a.inverse()
    };

    let s11 = dense.submatrix(0, s, 0, s);
    let inv11 = check("leading block", &s11)?;
    if s == dim {
        return BlockMatrix::from_dense(inv11);
    }
    let s12 = dense.submatrix(0, s, s, dim);
    let s21 = dense.submatrix(s, dim, 0, s);
    let s22 = dense.submatrix(s, dim, s, dim);

    let inv11_s12 = inv11.matmul(&s12);
    let s21_inv11 = s21.matmul(&inv11);
    let schur = s22.sub(&s21.matmul(&inv11_s12));
    let inv_schur = check("Schur complement", &schur)?;

    let upper_right = inv11_s12.matmul(&inv_schur).scale((-1.0).into());
    let lower_left = inv_schur.matmul(&s21_inv11).scale((-1.0).into());
    let upper_left = inv11.sub(&upper_right.matmul(&s21_inv11));

    let mut out = CMatrix::zeros(dim, dim);
    out.set_submatrix(0, 0, &upper_left);
    out.set_submatrix(0, s, &upper_right);
    out.set_submatrix(s, 0, &lower_left);
    out.set_submatrix(s, s, &inv_schur);
    BlockMatrix::from_dense(out)
}

/// Outcome of the randomized Type-II ⇒ inverse Type-I check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub trials: usize,
    pub passes: usize,
    pub resamples: usize,
    /// Largest relative Type-I residual over all inverses.
    pub max_residual: f64,
    pub worst_witness: Option<Witness>,
    pub tol: f64,
    /// Variant with the first diagonal scalar forced to zero.
    pub zero_first: ZeroFirstReport,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroFirstReport {
    pub checked: usize,
    pub passes: usize,
    /// Draws whose `t₁ = 0` variant was not invertible.
    pub skipped: usize,
    pub max_residual: f64,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.passes == self.trials && self.zero_first.passes == self.zero_first.checked
    }
}

struct TrialOutcome {
    passed: bool,
    resamples: usize,
    residual: f64,
    witness: Option<Witness>,
    zero_first: Option<(bool, f64)>,
}

const MAX_RESAMPLES: usize = 64;

/// Inverts a Type-II matrix densely and classifies the inverse.
fn check_inverse(m: &BlockMatrix, tol: f64) -> Option<(bool, f64, Option<Witness>)> {
    let inv = m.inverse().ok()?;
    let identity_err = m.matmul(&inv).sub(&BlockMatrix::identity(m.n())).max_block_norm();
    if !(identity_err <= 1e-6) {
        return None;
    }
    let report = classify(&inv, tol);
    Some((
        report.satisfies(StructureClass::TypeI),
        report.type_i_residual,
        report.witness,
    ))
}

fn lemma1_trial(n: usize, seed: u64, trial: usize, tol: f64) -> TrialOutcome {
    let mut rng = rng_from_seed(derive_seed(seed, &[n as u64, trial as u64]));
    let mut resamples = 0;
    loop {
        let m = sample_type_two(n, &mut rng);
        let Some((passed, residual, witness)) = check_inverse(&m, tol) else {
            resamples += 1;
            if resamples >= MAX_RESAMPLES {
                return TrialOutcome {
                    passed: false,
                    resamples,
                    residual: f64::INFINITY,
                    witness: None,
                    zero_first: None,
                };
            }
            continue;
        };
        let mut zeroed = m.clone();
        zeroed.set_block(0, 0, &Complex2x2::zero());
        let zero_first = check_inverse(&zeroed, tol).map(|(p, r, _)| (p, r));
        return TrialOutcome {
            passed,
            resamples,
            residual,
            witness,
            zero_first,
        };
    }
}

/// Samples `trials` random invertible Type-II matrices of block dimension
/// `n`, inverts each densely and checks the inverse is Type-I within `tol`
/// (relative). Every draw is re-checked with `t₁ = 0` when that variant stays
/// invertible. Trial `i` uses the sub-seed `derive_seed(seed, [n, i])`.
pub fn verify_lemma1(n: usize, trials: usize, seed: u64, tol: f64) -> Result<Lemma1Report> {
    if n == 0 || trials == 0 {
        return Err(Error::Domain(format!("need n >= 1 and trials >= 1, got n={n}, trials={trials}")));
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| lemma1_trial(n, seed, t, tol))
        .collect();

    let mut report = Lemma1Report {
        n,
        trials,
        passes: 0,
        resamples: 0,
        max_residual: 0.0,
        worst_witness: None,
        tol,
        zero_first: ZeroFirstReport::default(),
    };
    for o in outcomes {
        report.passes += o.passed as usize;
        report.resamples += o.resamples;
        if o.residual > report.max_residual || (o.residual.is_nan() && !report.max_residual.is_nan()) {
            report.max_residual = o.residual;
            report.worst_witness = o.witness;
        }
        match o.zero_first {
            Some((passed, r)) => {
                report.zero_first.checked += 1;
                report.zero_first.passes += passed as usize;
                report.zero_first.max_residual = report.zero_first.max_residual.max(r);
            }
            None => report.zero_first.skipped += 1,
        }
    }
    Ok(report)
}
