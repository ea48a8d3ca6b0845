//! Time evolution on the periodic grid and the probability current density.
//!
//! Free motion is applied exactly as a momentum-space phase. With a
//! potential, each step of length `dt` is the symmetric (Strang) product
//! `e^(−iV dt/2ħ) e^(−ip² dt/2mħ) e^(−iV dt/2ħ)`. There are no absorbing
//! layers: the grid must be large enough that the packet never reaches the
//! edges, and the edge probability is checked after every step.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qgrid::{interpolate_with_derivative, Grid, PhysicalConstants, Spectral, WaveFunction};

/// Upper bound on [`WaveFunction::edge_probability`] during a split-operator run.
pub const EDGE_PROBABILITY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Free,
    SquareBarrier { height: f64, left: f64, right: f64 },
    Harmonic { omega: f64, center: f64 },
    /// One value per grid node.
    Tabulated(Vec<f64>),
}

impl Potential {
    pub fn square_barrier(height: f64, left: f64, right: f64) -> Result<Self> {
        if !(left < right) {
            return Err(Error::param(
                "square_barrier",
                format!("left ({left}) must be below right ({right})"),
            ));
        }
        if !height.is_finite() {
            return Err(Error::param("square_barrier", "height must be finite"));
        }
        Ok(Potential::SquareBarrier { height, left, right })
    }

    pub fn harmonic(omega: f64, center: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::param("harmonic", format!("omega must be positive, got {omega}")));
        }
        Ok(Potential::Harmonic { omega, center })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("tabulated", "non-finite value"));
        }
        Ok(Potential::Tabulated(values))
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Potential::Free)
    }

    pub fn value_at(&self, x: f64, constants: PhysicalConstants) -> Option<f64> {
        match *self {
            Potential::Free => Some(0.0),
            Potential::SquareBarrier { height, left, right } => {
                Some(if (left..=right).contains(&x) { height } else { 0.0 })
            }
            Potential::Harmonic { omega, center } => {
                Some(0.5 * constants.mass() * omega * omega * (x - center).powi(2))
            }
            Potential::Tabulated(_) => None,
        }
    }

    /// Values on every node of `grid`.
    pub fn sample(&self, grid: &Grid, constants: PhysicalConstants) -> Result<Vec<f64>> {
        match self {
            Potential::Tabulated(values) => {
                if values.len() != grid.len() {
                    return Err(Error::param(
                        "tabulated",
                        format!("{} values for a grid of {}", values.len(), grid.len()),
                    ));
                }
                Ok(values.clone())
            }
            _ => Ok(grid
                .positions()
                .into_iter()
                .map(|x| self.value_at(x, constants).unwrap_or(0.0))
                .collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub dt: f64,
    pub steps: usize,
}

impl EvolutionParams {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        Ok(Self { dt, steps })
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Exact free evolution by `duration` (negative values evolve backwards).
pub fn evolve_free(psi: &WaveFunction, duration: f64) -> WaveFunction {
    let c = psi.constants();
    let mut spectral = Spectral::new(psi.grid(), c.hbar());
    let mut out = psi.clone();
    let data = out.amps_mut();
    spectral.forward(data);
    let factor = -duration / (2.0 * c.mass() * c.hbar());
    data.iter_mut()
        .zip(&spectral.momenta)
        .for_each(|(a, &p)| *a *= Complex64::from_polar(1.0, factor * p * p));
    spectral.inverse(data);
    out.set_time(psi.time() + duration);
    out
}

/// Reusable Strang stepper for one grid, potential and step size.
#[derive(Debug, Clone)]
pub(crate) struct SplitOperator {
    spectral: Spectral,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    dt: f64,
}

impl SplitOperator {
    /// `dt` may be negative for backward evolution.
    pub(crate) fn new(
        grid: &Grid,
        constants: PhysicalConstants,
        potential: &[f64],
        dt: f64,
    ) -> Result<Self> {
        if potential.len() != grid.len() {
            return Err(Error::param("potential", "length does not match grid"));
        }
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::param("dt", format!("must be finite and nonzero, got {dt}")));
        }
        let hbar = constants.hbar();
        let spectral = Spectral::new(grid, hbar);
        let half_potential = potential
            .iter()
            .map(|&v| Complex64::from_polar(1.0, -v * dt / (2.0 * hbar)))
            .collect();
        let kinetic = spectral
            .momenta
            .iter()
            .map(|&p| Complex64::from_polar(1.0, -p * p * dt / (2.0 * constants.mass() * hbar)))
            .collect();
        Ok(Self {
            spectral,
            half_potential,
            kinetic,
            dt,
        })
    }

    pub(crate) fn spectral_mut(&mut self) -> &mut Spectral {
        &mut self.spectral
    }

    pub(crate) fn momenta(&self) -> &[f64] {
        &self.spectral.momenta
    }

    /// One step in place on position amplitudes.
    pub(crate) fn step(&mut self, data: &mut [Complex64]) {
        mul_assign(data, &self.half_potential);
        self.spectral.forward(data);
        mul_assign(data, &self.kinetic);
        self.spectral.inverse(data);
        mul_assign(data, &self.half_potential);
    }

    /// `steps` steps, checking the edge probability after each one. `offset`
    /// only shifts the step index reported on failure.
    pub(crate) fn advance(&mut self, psi: &mut WaveFunction, steps: usize, offset: usize) -> Result<()> {
        let t0 = psi.time();
        for s in 0..steps {
            self.step(psi.amps_mut());
            let probability = psi.edge_probability();
            if probability > EDGE_PROBABILITY_LIMIT {
                return Err(Error::EdgeLeakage {
                    step: offset + s + 1,
                    probability,
                    limit: EDGE_PROBABILITY_LIMIT,
                });
            }
        }
        psi.set_time(t0 + steps as f64 * self.dt);
        Ok(())
    }
}

fn mul_assign(data: &mut [Complex64], factors: &[Complex64]) {
    data.iter_mut().zip(factors).for_each(|(a, f)| *a *= f);
}

/// Split-operator evolution over `params.steps` steps of `params.dt`.
pub fn evolve_potential(
    psi: &WaveFunction,
    potential: &Potential,
    params: EvolutionParams,
) -> Result<WaveFunction> {
    let c = psi.constants();
    let values = potential.sample(psi.grid(), c)?;
    let mut stepper = SplitOperator::new(psi.grid(), c, &values, params.dt)?;
    let mut out = psi.clone();
    stepper.advance(&mut out, params.steps, 0)?;
    Ok(out)
}

/// `J = (ħ/m) Im[ψ* ∂ψ/∂x]` at `x`, with ψ and ∂ψ/∂x evaluated from the
/// momentum view (exact for the band-limited representation).
pub fn current_density(psi: &WaveFunction, x: f64) -> Result<f64> {
    psi.grid().check_inside(x)?;
    let c = psi.constants();
    let mut spectral = Spectral::new(psi.grid(), c.hbar());
    let mut phi = psi.amps().to_vec();
    spectral.forward(&mut phi);
    Ok(current_from_momentum(psi.grid(), c, &spectral.momenta, &phi, x))
}

pub(crate) fn current_from_momentum(
    grid: &Grid,
    constants: PhysicalConstants,
    momenta_fft: &[f64],
    phi_fft: &[Complex64],
    x: f64,
) -> f64 {
    let (value, deriv) = interpolate_with_derivative(grid, constants.hbar(), momenta_fft, phi_fft, x);
    constants.hbar() / constants.mass() * (value.conj() * deriv).im
}
