//! Uniform position grids, their conjugate momentum lattices, and the
//! unitary spectral transform between the two views of a wavefunction.
//!
//! Conventions: node `i` sits at `x_min + i·dx` with `dx = (x_max − x_min)/n`,
//! and momentum node `j ∈ [−n/2, n/2)` at `p_j = 2πħ j/(n·dx)`. The transform
//!
//! ```text
//! φ̃(p_j) = (2πħ)^(−1/2) Σ_k ψ(x_k) e^(−i p_j x_k/ħ) dx
//! ```
//!
//! is unitary in the sense that `Σ|φ̃|² dp = Σ|ψ|² dx`, so discrete sums with
//! `dx`/`dp` weights approximate the continuum integrals directly. The domain
//! is periodic.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Allowed deviation of `Σ|ψ|²dx` from one for operations that need a
/// normalized state.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::param("hbar", format!("must be positive, got {hbar}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::param("mass", format!("must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    /// Atomic units (ħ = 1) with the given mass.
    pub fn atomic(mass: f64) -> Result<Self> {
        Self::new(1.0, mass)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
}

impl Grid {
    /// Builds a grid of `n` nodes covering the periodic cell `[x_min, x_max)`.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two ≥ 16, got {n}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            dx: (x_max - x_min) / n as f64,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Spacing of the conjugate momentum lattice, `2πħ/(n·dx)`.
    pub fn dp(&self, hbar: f64) -> f64 {
        2.0 * PI * hbar / self.length()
    }

    /// Momentum of signed lattice index `j ∈ [−n/2, n/2)`.
    pub fn momentum(&self, j: i64, hbar: f64) -> f64 {
        j as f64 * self.dp(hbar)
    }

    /// Momentum lattice in ascending order, `p_{−n/2} … p_{n/2−1}`.
    pub fn momenta(&self, hbar: f64) -> Vec<f64> {
        let half = (self.n / 2) as i64;
        (-half..half).map(|j| self.momentum(j, hbar)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    pub(crate) fn check_inside(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                x_min: self.x_min,
                x_max: self.x_max,
            })
        }
    }

    /// Number of nodes on each side counted as "edge" for wrap-around checks.
    pub fn edge_width(&self) -> usize {
        (self.n / 64).max(4)
    }
}

/// Sampled wavefunction at one parametric time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    constants: PhysicalConstants,
    amps: Vec<Complex64>,
    time: f64,
}

impl WaveFunction {
    pub fn new(
        grid: Grid,
        constants: PhysicalConstants,
        amps: Vec<Complex64>,
        time: f64,
    ) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::param(
                "amps",
                format!("length {} does not match grid size {}", amps.len(), grid.len()),
            ));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::param("amps", "non-finite amplitude"));
        }
        Ok(Self {
            grid,
            constants,
            amps,
            time,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Returns a copy rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm2 = self.norm2();
        if !(norm2 > 0.0) {
            return Err(Error::ZeroWeight);
        }
        let scale = norm2.sqrt().recip();
        let mut out = self.clone();
        out.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(out)
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let norm2 = self.norm2();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm2 });
        }
        Ok(())
    }

    /// Probability carried by the outermost [`Grid::edge_width`] nodes on
    /// both sides of the periodic cell.
    pub fn edge_probability(&self) -> f64 {
        let w = self.grid.edge_width();
        let n = self.grid.len();
        let edges = self.amps[..w].iter().chain(&self.amps[n - w..]);
        edges.map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Largest pointwise difference against another state on the same grid.
    pub fn sup_distance(&self, other: &WaveFunction) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Momentum-view amplitudes on the ascending momentum lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumAmplitudes {
    pub momenta: Vec<f64>,
    pub dp: f64,
    pub amps: Vec<Complex64>,
}

impl MomentumAmplitudes {
    pub fn norm2(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dp
    }
}

/// Planned forward/inverse transforms for one grid, working in FFT index
/// order (index `k` holds signed momentum index `k` for `k < n/2`, `k − n`
/// otherwise).
#[derive(Clone)]
pub(crate) struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `e^(−i p_j x_min/ħ)` times the forward normalization, FFT order.
    to_p: Vec<Complex64>,
    /// `e^(+i p_j x_min/ħ)` times the inverse normalization, FFT order.
    to_x: Vec<Complex64>,
    /// Momenta in FFT order.
    pub(crate) momenta: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    pub(crate) fn new(grid: &Grid, hbar: f64) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let momenta: Vec<f64> = (0..n)
            .map(|k| grid.momentum(fft_signed_index(k, n), hbar))
            .collect();
        let root = (2.0 * PI * hbar).sqrt().recip();
        let fwd = grid.dx() * root;
        let inv = grid.dp(hbar) * root;
        let to_p = momenta
            .iter()
            .map(|&p| Complex64::from_polar(fwd, -p * grid.x_min() / hbar))
            .collect();
        let to_x = momenta
            .iter()
            .map(|&p| Complex64::from_polar(inv, p * grid.x_min() / hbar))
            .collect();
        Self {
            n,
            forward,
            inverse,
            to_p,
            to_x,
            momenta,
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// Position amplitudes → momentum amplitudes (FFT order), in place.
    pub(crate) fn forward(&mut self, data: &mut [Complex64]) {
        self.forward.process_with_scratch(data, &mut self.scratch);
        data.iter_mut().zip(&self.to_p).for_each(|(a, w)| *a *= w);
    }

    /// Momentum amplitudes (FFT order) → position amplitudes, in place.
    pub(crate) fn inverse(&mut self, data: &mut [Complex64]) {
        data.iter_mut().zip(&self.to_x).for_each(|(a, w)| *a *= w);
        self.inverse.process_with_scratch(data, &mut self.scratch);
    }
}

pub(crate) fn fft_signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT order → ascending momentum order (and back: the swap is an involution
/// for even `n`).
pub(crate) fn fft_shift(data: &[Complex64]) -> Vec<Complex64> {
    let half = data.len() / 2;
    data[half..].iter().chain(&data[..half]).copied().collect()
}

pub fn to_momentum(psi: &WaveFunction) -> MomentumAmplitudes {
    let c = psi.constants();
    let mut spectral = Spectral::new(psi.grid(), c.hbar());
    let mut data = psi.amps().to_vec();
    spectral.forward(&mut data);
    MomentumAmplitudes {
        momenta: psi.grid().momenta(c.hbar()),
        dp: psi.grid().dp(c.hbar()),
        amps: fft_shift(&data),
    }
}

/// Inverse of [`to_momentum`]; `amps` must be on the ascending lattice of `grid`.
pub fn from_momentum(
    grid: &Grid,
    constants: PhysicalConstants,
    amps: &[Complex64],
    time: f64,
) -> Result<WaveFunction> {
    if amps.len() != grid.len() {
        return Err(Error::param(
            "amps",
            format!("length {} does not match grid size {}", amps.len(), grid.len()),
        ));
    }
    let mut spectral = Spectral::new(grid, constants.hbar());
    let mut data = fft_shift(amps);
    spectral.inverse(&mut data);
    WaveFunction::new(grid.clone(), constants, data, time)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Position,
    Momentum,
    KineticEnergy,
    PositionVariance,
}

/// Expectation value of `observable`; the state must be normalized.
pub fn expectation(psi: &WaveFunction, observable: Observable) -> Result<f64> {
    psi.require_normalized()?;
    let grid = psi.grid();
    let position_moment = |power: i32| {
        psi.amps()
            .iter()
            .enumerate()
            .map(|(i, a)| grid.x(i).powi(power) * a.norm_sqr())
            .sum::<f64>()
            * grid.dx()
    };
    let value = match observable {
        Observable::Position => position_moment(1),
        Observable::PositionVariance => {
            let mean = position_moment(1);
            psi.amps()
                .iter()
                .enumerate()
                .map(|(i, a)| (grid.x(i) - mean).powi(2) * a.norm_sqr())
                .sum::<f64>()
                * grid.dx()
        }
        Observable::Momentum | Observable::KineticEnergy => {
            let phi = to_momentum(psi);
            let two_m = 2.0 * psi.constants().mass();
            let weight = |p: f64| match observable {
                Observable::Momentum => p,
                _ => p * p / two_m,
            };
            phi.momenta
                .iter()
                .zip(&phi.amps)
                .map(|(&p, a)| weight(p) * a.norm_sqr())
                .sum::<f64>()
                * phi.dp
        }
    };
    Ok(value)
}

/// Band-limited (trigonometric) interpolation of ψ and ∂ψ/∂x at an arbitrary
/// point from FFT-ordered momentum amplitudes. The unpaired Nyquist mode is
/// split symmetrically so that a real ψ interpolates to a real value and its
/// derivative drops the mode entirely.
pub(crate) fn interpolate_with_derivative(
    grid: &Grid,
    hbar: f64,
    momenta_fft: &[f64],
    phi_fft: &[Complex64],
    x: f64,
) -> (Complex64, Complex64) {
    let n = grid.len();
    let scale = grid.dp(hbar) / (2.0 * PI * hbar).sqrt();
    let mut value = Complex64::default();
    let mut deriv = Complex64::default();
    for (k, (&p, &a)) in momenta_fft.iter().zip(phi_fft).enumerate() {
        if k == n / 2 {
            let anchor = Complex64::from_polar(1.0, p * grid.x_min() / hbar);
            value += a * anchor * (p * (x - grid.x_min()) / hbar).cos();
            continue;
        }
        let term = a * Complex64::from_polar(1.0, p * x / hbar);
        value += term;
        deriv += term * Complex64::new(0.0, p / hbar);
    }
    (value * scale, deriv * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &Grid, c: PhysicalConstants, x0: f64, p0: f64, s: f64) -> WaveFunction {
        let amps = grid
            .positions()
            .into_iter()
            .map(|x| {
                let env = (-(x - x0).powi(2) / (4.0 * s * s)).exp();
                Complex64::from_polar(env, p0 * x / c.hbar())
            })
            .collect();
        WaveFunction::new(grid.clone(), c, amps, 0.0)
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn grid_spacing() {
        let g = Grid::new(0.0, 32.0, 1024).unwrap();
        assert_eq!(g.dx(), 0.03125);
        assert_eq!(g.x(1024 - 1), 32.0 - 0.03125);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(matches!(Grid::new(0.0, 32.0, 1000), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(0.0, 32.0, 8), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(1.0, 1.0, 64), Err(Error::InvalidGrid(_))));
        assert!(matches!(Grid::new(2.0, 1.0, 64), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn momentum_lattice() {
        let g = Grid::new(-40.0, 40.0, 4096).unwrap();
        let p = g.momenta(1.0);
        assert!((g.dp(1.0) - 2.0 * PI / 80.0).abs() < 1e-15);
        assert_eq!(p.len(), 4096);
        assert_eq!(p[2048], 0.0);
        // symmetric except for the single Nyquist node at the bottom
        assert!((p[0] + 2048.0 * g.dp(1.0)).abs() < 1e-12);
        assert!((p[4095] - 2047.0 * g.dp(1.0)).abs() < 1e-12);
        for j in 1..2048 {
            assert!((p[2048 + j] + p[2048 - j]).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_must_be_positive() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert!(PhysicalConstants::atomic(0.5).is_ok());
    }

    #[test]
    fn gaussian_momentum_profile() {
        let c = PhysicalConstants::default();
        let g = Grid::new(-20.0, 20.0, 512).unwrap();
        let psi = gaussian(&g, c, 0.0, 0.0, 1.0);
        let phi = to_momentum(&psi);
        // closed form: (2σ²/πħ²)^(1/4) exp(−σ²p²/ħ²), real and positive
        for (&p, a) in phi.momenta.iter().zip(&phi.amps) {
            let expected = (2.0 / PI).powf(0.25) * (-p * p).exp();
            assert!((a.re - expected).abs() < 1e-12, "p={p}");
            assert!(a.im.abs() < 1e-12);
        }
        let var_p: f64 = phi
            .momenta
            .iter()
            .zip(&phi.amps)
            .map(|(p, a)| p * p * a.norm_sqr())
            .sum::<f64>()
            * phi.dp;
        assert!((var_p.sqrt() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn shift_theorem() {
        let c = PhysicalConstants::default();
        let g = Grid::new(-20.0, 20.0, 512).unwrap();
        let dp = g.dp(1.0);
        let p0 = 16.0 * dp;
        let a = to_momentum(&gaussian(&g, c, 0.0, 0.0, 1.0));
        let b = to_momentum(&gaussian(&g, c, 0.0, p0, 1.0));
        for m in 16..512 {
            assert!((b.amps[m] - a.amps[m - 16]).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let c = PhysicalConstants::new(0.7, 2.0).unwrap();
        let g = Grid::new(-13.0, 19.0, 256).unwrap();
        let psi = gaussian(&g, c, 1.0, 3.0, 0.8);
        let phi = to_momentum(&psi);
        assert!((phi.norm2() - psi.norm2()).abs() < 1e-12);
        let back = from_momentum(&g, c, &phi.amps, 0.0).unwrap();
        assert!(back.sup_distance(&psi) < 1e-12);
    }

    #[test]
    fn expectations_of_displaced_gaussian() {
        let c = PhysicalConstants::atomic(0.5).unwrap();
        let g = Grid::new(-10.0, 60.0, 2048).unwrap();
        let psi = gaussian(&g, c, 5.0, 5.0, 1.0);
        assert!((expectation(&psi, Observable::Position).unwrap() - 5.0).abs() < 1e-8);
        assert!((expectation(&psi, Observable::Momentum).unwrap() - 5.0).abs() < 1e-8);
        assert!((expectation(&psi, Observable::PositionVariance).unwrap() - 1.0).abs() < 1e-8);
        let ke = expectation(&psi, Observable::KineticEnergy).unwrap();
        assert!((ke - 25.25).abs() < 1e-8, "{ke}");
    }

    #[test]
    fn expectation_rejects_unnormalized() {
        let c = PhysicalConstants::default();
        let g = Grid::new(-10.0, 10.0, 64).unwrap();
        let psi = WaveFunction::new(g, c, vec![Complex64::new(1.0, 0.0); 64], 0.0).unwrap();
        assert!(matches!(
            expectation(&psi, Observable::Position),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn interpolation_hits_nodes_and_keeps_real_states_real() {
        let c = PhysicalConstants::default();
        let g = Grid::new(-10.0, 10.0, 256).unwrap();
        let mut psi = gaussian(&g, c, 0.3, 0.0, 1.0);
        psi.amps_mut().iter_mut().for_each(|a| a.im = 0.0);
        let mut s = Spectral::new(&g, 1.0);
        let mut phi = psi.amps().to_vec();
        s.forward(&mut phi);
        let (v, d) = interpolate_with_derivative(&g, 1.0, &s.momenta, &phi, g.x(100));
        assert!((v - psi.amps()[100]).norm() < 1e-13);
        let (v, d2) = interpolate_with_derivative(&g, 1.0, &s.momenta, &phi, 0.123);
        assert!(v.im.abs() < 1e-14 && d.im.abs() < 1e-14 && d2.im.abs() < 1e-14);
        let env = |x: f64| (-(x - 0.3f64).powi(2) / 4.0).exp();
        assert!((v.re / psi.amps()[128].re - env(0.123) / env(g.x(128))).abs() < 1e-12);
    }
}
