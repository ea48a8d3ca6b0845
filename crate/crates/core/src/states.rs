//! Initial wavepackets and crossing-state overlaps.
//!
//! The crossing state for branch α at point X is `(|p̂|/m)^(1/2) Θ(αp̂)|X⟩`.
//! Its overlap with ψ is evaluated by a direct sum over the momentum lattice,
//!
//! ```text
//! χ_α = (2πħ)^(−1/2) Σ_{α p_j > 0} (|p_j|/m)^(1/2) e^(i p_j X/ħ) φ̃(p_j) dp
//! ```
//!
//! so X need not be a grid node. The kernel vanishes at p = 0 and is not smooth
//! there; packets with appreciable weight near zero momentum need a finer
//! momentum lattice (a longer cell) to be resolved.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qgrid::{Grid, PhysicalConstants, Spectral, WaveFunction};

/// Maximum |ψ| allowed on the first and last grid node of a fresh packet.
pub const EDGE_AMPLITUDE_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub x0: f64,
    pub p0: f64,
    /// Position spread: `⟨(q̂ − x0)²⟩ = sigma_q²`.
    pub sigma_q: f64,
}

impl GaussianSpec {
    pub fn new(x0: f64, p0: f64, sigma_q: f64) -> Result<Self> {
        if !(sigma_q > 0.0 && sigma_q.is_finite()) {
            return Err(Error::param("sigma_q", format!("must be positive, got {sigma_q}")));
        }
        if !(x0.is_finite() && p0.is_finite()) {
            return Err(Error::param("x0/p0", "must be finite"));
        }
        Ok(Self { x0, p0, sigma_q })
    }

    /// Momentum spread of the minimum-uncertainty packet, `ħ/(2σq)`.
    pub fn sigma_p(&self, hbar: f64) -> f64 {
        hbar / (2.0 * self.sigma_q)
    }
}

/// Minimum-uncertainty Gaussian `∝ exp(−(x−x0)²/(4σq²) + i p0 x/ħ)`,
/// normalized on the grid, at parametric time zero.
pub fn gaussian(spec: &GaussianSpec, grid: &Grid, constants: PhysicalConstants) -> Result<WaveFunction> {
    let s2 = spec.sigma_q * spec.sigma_q;
    let amps = grid
        .positions()
        .into_iter()
        .map(|x| {
            let envelope = (-(x - spec.x0).powi(2) / (4.0 * s2)).exp();
            Complex64::from_polar(envelope, spec.p0 * x / constants.hbar())
        })
        .collect();
    let psi = WaveFunction::new(grid.clone(), constants, amps, 0.0)?.normalized()?;
    let edge = psi.amps()[0].norm().max(psi.amps()[grid.len() - 1].norm());
    if edge > EDGE_AMPLITUDE_LIMIT {
        return Err(Error::Leakage { amplitude: edge });
    }
    Ok(psi)
}

/// Direction branch α: `Plus` selects right movers (p > 0), `Minus` left movers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn admits(self, p: f64) -> bool {
        self.sign() * p > 0.0
    }
}

/// χ = ⟨u_α|ψ⟩; units of time^(−1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingAmplitude {
    pub value: Complex64,
    pub branch: Branch,
    pub point: f64,
}

impl CrossingAmplitude {
    /// `|χ|²`, an arrival-time density.
    pub fn density(&self) -> f64 {
        self.value.norm_sqr()
    }
}

/// Precomputed `⟨u_α|p_j⟩ dp` weights in FFT order, so that χ is one dot
/// product with FFT-ordered momentum amplitudes.
#[derive(Debug, Clone)]
pub(crate) struct CrossingKernel {
    pub(crate) branch: Branch,
    pub(crate) point: f64,
    weights: Vec<Complex64>,
}

impl CrossingKernel {
    pub(crate) fn new(
        grid: &Grid,
        constants: PhysicalConstants,
        momenta_fft: &[f64],
        point: f64,
        branch: Branch,
    ) -> Result<Self> {
        grid.check_inside(point)?;
        let hbar = constants.hbar();
        let scale = grid.dp(hbar) / (2.0 * PI * hbar).sqrt();
        let weights = momenta_fft
            .iter()
            .map(|&p| {
                if branch.admits(p) {
                    let speed = p.abs() / constants.mass();
                    Complex64::from_polar(scale * speed.sqrt(), p * point / hbar)
                } else {
                    Complex64::default()
                }
            })
            .collect();
        Ok(Self {
            branch,
            point,
            weights,
        })
    }

    pub(crate) fn apply(&self, phi_fft: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(phi_fft).map(|(w, a)| w * a).sum()
    }

    pub(crate) fn amplitude(&self, phi_fft: &[Complex64]) -> CrossingAmplitude {
        CrossingAmplitude {
            value: self.apply(phi_fft),
            branch: self.branch,
            point: self.point,
        }
    }
}

pub fn crossing_amplitude(psi: &WaveFunction, point: f64, branch: Branch) -> Result<CrossingAmplitude> {
    let c = psi.constants();
    let mut spectral = Spectral::new(psi.grid(), c.hbar());
    let kernel = CrossingKernel::new(psi.grid(), c, &spectral.momenta, point, branch)?;
    let mut phi = psi.amps().to_vec();
    spectral.forward(&mut phi);
    Ok(kernel.amplitude(&phi))
}
