//! Closed-form free-Gaussian expressions and a small adaptive quadrature,
//! written independently of the library.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Free minimum-uncertainty packet `(2πσ²)^(-1/4) exp(-(x-x0)²/4σ² + i p0 x/ħ)`
/// at t = 0.
#[derive(Debug, Clone, Copy)]
pub struct FreeGaussian {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl FreeGaussian {
    pub fn new(x0: f64, p0: f64, sigma: f64, hbar: f64, mass: f64) -> Self {
        Self { x0, p0, sigma, hbar, mass }
    }

    /// `φ̃(p) = (2π ħ)^(-1/2) ∫ ψ(x) e^{-ipx/ħ} dx`.
    pub fn momentum(&self, p: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let h = self.hbar;
        let modulus = (2.0 * s2 / (PI * h * h)).powf(0.25) * (-s2 * (p - self.p0).powi(2) / (h * h)).exp();
        Complex64::from_polar(modulus, -(p - self.p0) * self.x0 / h)
    }

    pub fn width2(&self, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        s2 * (1.0 + (self.hbar * t / (2.0 * self.mass * s2)).powi(2))
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        let w2 = self.width2(t);
        let centre = self.x0 + self.p0 * t / self.mass;
        (-(x - centre).powi(2) / (2.0 * w2)).exp() / (2.0 * PI * w2).sqrt()
    }

    pub fn velocity(&self, x: f64, t: f64) -> f64 {
        let (h, m, s2) = (self.hbar, self.mass, self.sigma * self.sigma);
        let centre = self.x0 + self.p0 * t / m;
        self.p0 / m + (x - centre) * h * h * t / (4.0 * m * m * s2 * s2 + h * h * t * t)
    }

    pub fn current(&self, x: f64, t: f64) -> f64 {
        self.density(x, t) * self.velocity(x, t)
    }

    /// Crossing amplitude for the + branch by quadrature over momentum.
    pub fn crossing_plus(&self, x: f64, t: f64) -> Complex64 {
        let (h, m) = (self.hbar, self.mass);
        let spread = 8.0 * h / self.sigma;
        let lo = (self.p0 - spread).max(0.0);
        let hi = (self.p0 + spread).max(1e-300);
        let f = |p: f64| {
            let phase = p * x / h - p * p * t / (2.0 * m * h);
            self.momentum(p) * Complex64::from_polar((p / m).sqrt(), phase)
        };
        adaptive_simpson(&f, lo, hi, 1e-14) / (2.0 * PI * h).sqrt()
    }
}

/// Adaptive Simpson quadrature for complex integrands.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // split into panels so no single Simpson estimate can miss oscillations
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            step(f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 40)
        })
        .sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
