//! Lowest eigenpair of a real symmetric tridiagonal matrix: Sturm-sequence
//! bisection brackets the smallest eigenvalue from below, inverse iteration
//! at that shift converges the eigenvector, and the Rayleigh quotient gives
//! the eigenvalue to working precision.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Unit 2-norm, oriented so the entries sum to a positive number.
    pub vector: Vec<f64>,
    /// `‖Av − λv‖₂ / max(|λ|, 1)`.
    pub residual: f64,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::param(
                "tridiagonal",
                format!("{} diagonal and {} off-diagonal entries", diag.len(), off.len()),
            ));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_lower(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |v| v.abs());
                self.diag[i] - left - right
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn rayleigh(&self, v: &[f64]) -> f64 {
        let av = self.apply(v);
        dot(v, &av) / dot(v, v)
    }

    pub fn lowest_eigenpair(&self) -> Result<Eigenpair> {
        let n = self.len();
        if n == 1 {
            return Ok(Eigenpair {
                value: self.diag[0],
                vector: vec![1.0],
                residual: 0.0,
            });
        }
        // bracket [lo, hi] with count(lo) == 0 and count(hi) >= 1
        let mut lo = self.gershgorin_lower();
        lo -= 1e-12 * lo.abs().max(1.0);
        let mut hi = self.diag.iter().copied().fold(f64::INFINITY, f64::min);
        if self.count_below(hi) == 0 {
            // the minimum diagonal entry is itself the lowest eigenvalue
            hi += f64::EPSILON * hi.abs().max(1.0) * 4.0;
        }
        for _ in 0..200 {
            let width = hi - lo;
            if width <= 1e-10 * hi.abs().max(lo.abs()).max(1e-300) {
                break;
            }
            let mid = lo + 0.5 * width;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let mut margin = 1e-13 * lo.abs().max(1.0);
        let factor = loop {
            match Ldl::factor(self, lo - margin) {
                Ok(f) => break f,
                Err(e) if margin > 1e-6 * lo.abs().max(1.0) => return Err(e),
                Err(_) => margin *= 16.0,
            }
        };
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut converged = false;
        for _ in 0..100 {
            let mut y = factor.solve(&v);
            let norm = dot(&y, &y).sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::NonConvergence("inverse iteration produced a singular solve".into()));
            }
            y.iter_mut().for_each(|a| *a /= norm);
            if y.iter().sum::<f64>() < 0.0 {
                y.iter_mut().for_each(|a| *a = -*a);
            }
            let change = y.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = y;
            if change < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence("inverse iteration did not settle".into()));
        }
        let value = self.rayleigh(&v);
        let av = self.apply(&v);
        let residual = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - value * b).powi(2))
            .sum::<f64>()
            .sqrt()
            / value.abs().max(1.0);
        let margin = 1e-9 * value.abs().max(1.0);
        if self.count_below(value - margin) != 0 {
            return Err(Error::NonConvergence(
                "inverse iteration converged to an excited state".into(),
            ));
        }
        Ok(Eigenpair {
            value,
            vector: v,
            residual,
        })
    }
}

/// `A − σI = L D Lᵀ` without pivoting; only valid for σ below the spectrum.
struct Ldl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl Ldl {
    fn factor(a: &SymTridiagonal, shift: f64) -> Result<Self> {
        let n = a.len();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        d.push(a.diag[0] - shift);
        for i in 1..n {
            let li = a.off[i - 1] / d[i - 1];
            l.push(li);
            d.push(a.diag[i] - shift - li * a.off[i - 1]);
        }
        if d.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::NonConvergence(
                "shift is not below the spectrum".into(),
            ));
        }
        Ok(Self { d, l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= self.l[i - 1] * y[i - 1];
        }
        for (v, d) in y.iter_mut().zip(&self.d) {
            *v /= d;
        }
        for i in (0..n - 1).rev() {
            y[i] -= self.l[i] * y[i + 1];
        }
        y
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
