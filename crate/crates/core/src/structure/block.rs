use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quaternion::Complex2x2;

/// A 2n×2n complex matrix addressed by 2×2 blocks.
///
/// Block `(j, k)` (zero-based) covers rows `2j..2j+2` and columns `2k..2k+2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrix {
    n: usize,
    dense: CMatrix,
}

impl BlockMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            dense: CMatrix::zeros(2 * n, 2 * n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            dense: CMatrix::identity(2 * n),
        }
    }

    /// Wraps a dense matrix; it must be square with even dimension.
    pub fn from_dense(dense: CMatrix) -> Result<Self> {
        if !dense.is_square() || dense.rows() % 2 != 0 {
            return Err(Error::Domain(format!(
                "block matrix needs an even square shape, got {}x{}",
                dense.rows(),
                dense.cols()
            )));
        }
        Ok(Self {
            n: dense.rows() / 2,
            dense,
        })
    }

    pub fn from_blocks(n: usize, mut f: impl FnMut(usize, usize) -> Complex2x2) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            for k in 0..n {
                m.set_block(j, k, &f(j, k));
            }
        }
        m
    }

    /// Block dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dense(&self) -> &CMatrix {
        &self.dense
    }

    pub fn into_dense(self) -> CMatrix {
        self.dense
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.dense[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.dense[(r, c)] = v;
    }

    pub fn block(&self, j: usize, k: usize) -> Complex2x2 {
        let d = &self.dense;
        let (r, c) = (2 * j, 2 * k);
        Complex2x2::new(d[(r, c)], d[(r, c + 1)], d[(r + 1, c)], d[(r + 1, c + 1)])
    }

    pub fn set_block(&mut self, j: usize, k: usize, b: &Complex2x2) {
        let (r, c) = (2 * j, 2 * k);
        for (dr, row) in b.0.iter().enumerate() {
            for (dc, &v) in row.iter().enumerate() {
                self.dense[(r + dr, c + dc)] = v;
            }
        }
    }

    /// Largest entry modulus over all blocks.
    pub fn max_block_norm(&self) -> f64 {
        self.dense.max_abs()
    }

    pub fn shift(&self, z: Complex64) -> Self {
        Self {
            n: self.n,
            dense: self.dense.shift(z),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            dense: self.dense.matmul(&other.dense),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            dense: self.dense.sub(&other.dense),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.dense.trace()
    }

    /// Dense inverse by partial-pivoted elimination.
    pub fn inverse(&self) -> Result<Self> {
        Ok(Self {
            n: self.n,
            dense: self.dense.inverse()?,
        })
    }

    /// Copy with block row and block column `k` removed.
    pub fn without_block(&self, k: usize) -> Self {
        Self {
            n: self.n - 1,
            dense: self.dense.without(&[2 * k, 2 * k + 1]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_addressing() {
        let mut m = BlockMatrix::zeros(3);
        let b = Complex2x2::from_real([[1., 2.], [3., 4.]]);
        m.set_block(1, 2, &b);
        assert_eq!(m.block(1, 2), b);
        assert_eq!(m.get(2, 4), Complex64::new(1.0, 0.0));
        assert_eq!(m.get(3, 5), Complex64::new(4.0, 0.0));
        assert_eq!(m.block(2, 1), Complex2x2::zero());
    }

    #[test]
    fn odd_dense_is_rejected() {
        assert!(BlockMatrix::from_dense(CMatrix::zeros(3, 3)).is_err());
        assert!(BlockMatrix::from_dense(CMatrix::zeros(4, 2)).is_err());
    }
}
