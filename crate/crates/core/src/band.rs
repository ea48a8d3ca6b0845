//! Symmetric banded matrices and their LDLᵀ factorization, used to refine
//! eigenvectors with wide finite-difference stencils.

use crate::error::{Error, Result};

/// Symmetric matrix with `bands.len()` sub-diagonals; `bands[m][i]` is the
/// entry at `(i + m + 1, i)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SymBanded {
    pub(crate) diag: Vec<f64>,
    pub(crate) bands: Vec<Vec<f64>>,
}

impl SymBanded {
    pub(crate) fn len(&self) -> usize {
        self.diag.len()
    }

    fn entry(&self, row: usize, col: usize) -> f64 {
        let (hi, lo) = if row >= col { (row, col) } else { (col, row) };
        match hi - lo {
            0 => self.diag[lo],
            m if m <= self.bands.len() => self.bands[m - 1][lo],
            _ => 0.0,
        }
    }

    pub(crate) fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diag.iter().zip(v).map(|(d, x)| d * x).collect();
        for (m, band) in self.bands.iter().enumerate() {
            let k = m + 1;
            for (i, a) in band.iter().enumerate() {
                out[i + k] += a * v[i];
                out[i] += a * v[i + k];
            }
        }
        out
    }

    /// `A − σI = L D Lᵀ`; fails unless every pivot is positive, i.e. unless
    /// σ lies below the spectrum.
    pub(crate) fn factor(&self, shift: f64) -> Result<BandLdl> {
        let n = self.len();
        let b = self.bands.len();
        // l[i][m] = L(i, i − m − 1)
        let mut l = vec![vec![0.0; b]; n];
        let mut d = vec![0.0; n];
        for j in 0..n {
            let mut pivot = self.diag[j] - shift;
            for (m, lm) in l[j].iter().take(b.min(j)).enumerate() {
                pivot -= lm * lm * d[j - m - 1];
            }
            if !(pivot > 0.0) {
                return Err(Error::NonConvergence("banded shift is not below the spectrum".into()));
            }
            d[j] = pivot;
            for i in j + 1..n.min(j + b + 1) {
                let mut s = self.entry(i, j);
                for k in i.saturating_sub(b)..j {
                    s -= l[i][i - k - 1] * l[j][j - k - 1] * d[k];
                }
                l[i][i - j - 1] = s / pivot;
            }
        }
        Ok(BandLdl { l, d })
    }
}

pub(crate) struct BandLdl {
    l: Vec<Vec<f64>>,
    d: Vec<f64>,
}

impl BandLdl {
    pub(crate) fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let b = self.l.first().map_or(0, Vec::len);
        let mut y = rhs.to_vec();
        for i in 0..n {
            for m in 0..b.min(i) {
                y[i] -= self.l[i][m] * y[i - m - 1];
            }
        }
        for (v, d) in y.iter_mut().zip(&self.d) {
            *v /= d;
        }
        for i in (0..n).rev() {
            for m in 0..b.min(n - 1 - i) {
                let r = i + m + 1;
                y[i] -= self.l[r][m] * y[r];
            }
        }
        y
    }
}

/// Compensated (Neumaier) sum.
pub(crate) fn accurate_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
