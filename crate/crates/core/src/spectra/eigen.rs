//! Eigenvalues of dense complex Hermitian matrices.
//!
//! The matrix is reduced to Hermitian tridiagonal form with complex
//! Householder reflectors acting on the lower triangle. A diagonal unitary
//! similarity then rotates every subdiagonal entry onto the non-negative real
//! axis, which leaves a real symmetric tridiagonal matrix with the same
//! spectrum. That matrix is diagonalized by the implicitly shifted QL
//! iteration (EISPACK `tql1` lineage).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative Hermitian-residual threshold accepted by the solver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues_dense(m: &CMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "eigenvalues of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.max_abs();
    let residual = m.hermitian_residual();
    let tol = HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE);
    if residual > tol || !residual.is_finite() {
        return Err(Error::NotHermitian { residual, tol });
    }
    let (mut diag, mut off) = tridiagonalize(m);
    tql(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Reduces a Hermitian matrix to real symmetric tridiagonal form.
///
/// Returns `(d, e)` with `e[i]` coupling `d[i]` and `d[i + 1]`; `e` has the
/// same length as `d` and its last entry is zero. Only the lower triangle of
/// `m` is read.
pub fn tridiagonalize(m: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a: Vec<Complex64> = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];

    for k in 0..n.saturating_sub(1) {
        let s = k + 1;
        let len = n - s;
        // Column k below the diagonal.
        let mut sigma2 = 0.0;
        for i in s..n {
            sigma2 += a[i * n + k].norm_sqr();
        }
        let sigma = sigma2.sqrt();
        if sigma == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[s * n + k];
        let x0_abs = x0.norm();
        let phase = if x0_abs > 0.0 { x0 / x0_abs } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * sigma;
        let tau = 1.0 / (sigma * (sigma + x0_abs));

        let v = &mut v[..len];
        for (t, i) in (s..n).enumerate() {
            v[t] = a[i * n + k];
        }
        v[0] = phase * (x0_abs + sigma);

        // p = tau * B v with B the trailing Hermitian block, from its lower triangle.
        let p = &mut p[..len];
        p.iter_mut().for_each(|x| *x = ZERO);
        for r in 0..len {
            let row = &a[(s + r) * n + s..(s + r) * n + s + r];
            let vr = v[r];
            let mut acc = ZERO;
            for ((&brc, &vc), pc) in row.iter().zip(v.iter()).zip(p.iter_mut()) {
                acc += brc * vc;
                *pc += brc.conj() * vr;
            }
            let diag = a[(s + r) * n + s + r];
            p[r] += acc + diag * vr;
        }
        let mut vp = ZERO;
        for (vi, pi) in v.iter_mut().zip(p.iter_mut()) {
            *pi *= tau;
            vp += vi.conj() * *pi;
        }
        let kk = 0.5 * tau * vp.re;
        for (pi, &vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kk;
        }
        // B -= v w* + w v*, lower triangle only.
        for r in 0..len {
            let vr = v[r];
            let wr = p[r];
            let row = &mut a[(s + r) * n + s..(s + r) * n + s + r + 1];
            for ((b, &vc), &wc) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *b -= vr * wc.conj() + wr * vc.conj();
            }
        }
        e[k] = alpha.norm();
        a[s * n + k] = alpha;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[i * n + i].re;
    }
    (d, e)
}

/// Implicit QL on a real symmetric tridiagonal matrix; eigenvalues land in
/// `d` (unsorted). `e[i]` couples `d[i]` and `d[i + 1]`.
pub fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let max_iter = 60 * n.max(1);
    let mut iterations = 0usize;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::NoConvergence { iterations });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
