//! Time-of-arrival densities at a fixed point.
//!
//! For a nominal time T after the state's own parametric time, the density
//! per branch is `|⟨u_α| e^(−iHT/ħ) |ψ⟩|²`. With `H = H₀` this is Kijowski's
//! distribution and is evaluated exactly in momentum space; for a general
//! potential the state is carried forward by the split-operator stepper in a
//! single sweep, sampling at each lattice time. The general density is not
//! normalized and is reported raw.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagate::{current_from_momentum, Potential, SplitOperator};
use crate::qgrid::{Spectral, WaveFunction};
use crate::states::{Branch, CrossingKernel};

/// Uniform lattice `start + k·step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeLattice {
    start: f64,
    step: f64,
    count: usize,
}

impl TimeLattice {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyTimes);
        }
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(Error::param("times", format!("need finite start and positive step, got {start}, {step}")));
        }
        Ok(Self { start, step, count })
    }

    /// Lattice from `start` to `end` inclusive with spacing `step`; `end`
    /// is rounded to the nearest lattice point.
    pub fn spanning(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(end >= start) {
            return Err(Error::param("times", format!("end ({end}) before start ({start})")));
        }
        let intervals = ((end - start) / step).round() as usize;
        Self::new(start, step, intervals + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.time(self.count - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.time(k)).collect()
    }

    /// Same spacing, origin moved by `shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            start: self.start + shift,
            ..*self
        }
    }

    /// Trapezoid rule over the lattice.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let n = values.len();
        match n {
            0 => 0.0,
            1 => 0.0,
            _ => (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])) * self.step,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalSeries {
    pub x: f64,
    pub times: TimeLattice,
    pub pi_plus: Vec<f64>,
    pub pi_minus: Vec<f64>,
    /// Probability current density at `x` on the same lattice.
    pub j: Vec<f64>,
}

impl ArrivalSeries {
    fn with_capacity(x: f64, times: TimeLattice) -> Self {
        Self {
            x,
            times,
            pi_plus: Vec::with_capacity(times.len()),
            pi_minus: Vec::with_capacity(times.len()),
            j: Vec::with_capacity(times.len()),
        }
    }

    pub fn branch(&self, branch: Branch) -> &[f64] {
        match branch {
            Branch::Plus => &self.pi_plus,
            Branch::Minus => &self.pi_minus,
        }
    }

    /// Trapezoid integral of one branch over the window.
    pub fn window_integral(&self, branch: Branch) -> f64 {
        self.times.integrate(self.branch(branch))
    }

    /// `Σ_α ∫ Π_α dT` over the window.
    pub fn total_weight(&self) -> f64 {
        Branch::BOTH.iter().map(|&b| self.window_integral(b)).sum()
    }

    /// Time and value of the largest sample of one branch.
    pub fn peak(&self, branch: Branch) -> (f64, f64) {
        let (k, v) = self
            .branch(branch)
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
        (self.times.time(k), v)
    }

    /// `max_T |Π₊ − J| / max_T |J|`.
    pub fn flux_deviation(&self) -> f64 {
        let scale = self.j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dev = self
            .pi_plus
            .iter()
            .zip(&self.j)
            .fold(0.0f64, |m, (p, j)| m.max((p - j).abs()));
        dev / scale
    }

    fn push(&mut self, plus: f64, minus: f64, j: f64) {
        self.pi_plus.push(plus);
        self.pi_minus.push(minus);
        self.j.push(j);
    }
}

struct Sampler {
    plus: CrossingKernel,
    minus: CrossingKernel,
}

impl Sampler {
    fn new(psi: &WaveFunction, momenta_fft: &[f64], x: f64) -> Result<Self> {
        let (g, c) = (psi.grid(), psi.constants());
        Ok(Self {
            plus: CrossingKernel::new(g, c, momenta_fft, x, Branch::Plus)?,
            minus: CrossingKernel::new(g, c, momenta_fft, x, Branch::Minus)?,
        })
    }

    fn sample(&self, series: &mut ArrivalSeries, psi: &WaveFunction, momenta_fft: &[f64], phi_fft: &[Complex64]) {
        let j = current_from_momentum(psi.grid(), psi.constants(), momenta_fft, phi_fft, series.x);
        series.push(
            self.plus.apply(phi_fft).norm_sqr(),
            self.minus.apply(phi_fft).norm_sqr(),
            j,
        );
    }
}

/// Kijowski's free-motion distribution at `x` for nominal times `times`
/// measured from the parametric time of `psi0`.
pub fn kijowski_free(psi0: &WaveFunction, x: f64, times: &TimeLattice) -> Result<ArrivalSeries> {
    psi0.require_normalized()?;
    let c = psi0.constants();
    let mut spectral = Spectral::new(psi0.grid(), c.hbar());
    let sampler = Sampler::new(psi0, &spectral.momenta, x)?;
    let mut phi0 = psi0.amps().to_vec();
    spectral.forward(&mut phi0);
    let factor = -1.0 / (2.0 * c.mass() * c.hbar());
    let mut series = ArrivalSeries::with_capacity(x, *times);
    let mut phi = vec![Complex64::default(); phi0.len()];
    for t in times.times() {
        for ((out, a), &p) in phi.iter_mut().zip(&phi0).zip(&spectral.momenta) {
            *out = a * Complex64::from_polar(1.0, factor * p * p * t);
        }
        sampler.sample(&mut series, psi0, &spectral.momenta, &phi);
    }
    Ok(series)
}

/// Arrival density under `potential`, sampled along one forward sweep.
///
/// The propagation step is the largest value not exceeding `max_dt` that
/// divides both the lattice spacing and the offset of the first sample;
/// a negative first time is reached by evolving backwards. Edge leakage
/// anywhere in the sweep aborts the run.
pub fn arrival_general(
    psi0: &WaveFunction,
    potential: &Potential,
    x: f64,
    times: &TimeLattice,
    max_dt: f64,
) -> Result<ArrivalSeries> {
    psi0.require_normalized()?;
    if !(max_dt > 0.0 && max_dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {max_dt}")));
    }
    let (grid, c) = (psi0.grid(), psi0.constants());
    grid.check_inside(x)?;
    let values = potential.sample(grid, c)?;

    let substeps = steps_for(times.step(), max_dt);
    let mut stepper = SplitOperator::new(grid, c, &values, times.step() / substeps as f64)?;
    let momenta = stepper.momenta().to_vec();
    let sampler = Sampler::new(psi0, &momenta, x)?;

    let mut psi = psi0.clone();
    let mut taken = 0;
    if times.start() != 0.0 {
        let n0 = steps_for(times.start().abs(), max_dt);
        let mut lead = SplitOperator::new(grid, c, &values, times.start() / n0 as f64)?;
        lead.advance(&mut psi, n0, 0)?;
        taken = n0;
    }

    let mut series = ArrivalSeries::with_capacity(x, *times);
    let mut phi = vec![Complex64::default(); grid.len()];
    for k in 0..times.len() {
        if k > 0 {
            stepper.advance(&mut psi, substeps, taken)?;
            taken += substeps;
        }
        phi.copy_from_slice(psi.amps());
        stepper.spectral_mut().forward(&mut phi);
        sampler.sample(&mut series, &psi, &momenta, &phi);
    }
    Ok(series)
}

fn steps_for(span: f64, max_dt: f64) -> usize {
    ((span / max_dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}
