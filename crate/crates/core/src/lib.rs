//! Quantum time-of-arrival distributions for free motion and arbitrary
//! one-dimensional potentials, and the states of minimum time-energy
//! uncertainty for arrival-time amplitudes.
//!
//! Quantities are in units where ħ and the particle mass are carried
//! explicitly by [`PhysicalConstants`] (atomic units by default).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrival;
mod band;
pub mod error;
pub mod propagate;
pub mod qgrid;
pub mod states;
pub mod tridiag;
pub mod wigner;

pub use arrival::{arrival_general, kijowski_free, ArrivalSeries, TimeLattice};
pub use error::{Error, Result};
pub use propagate::{current_density, evolve_free, evolve_potential, EvolutionParams, Potential};
pub use qgrid::{expectation, from_momentum, to_momentum, Grid, MomentumAmplitudes, Observable, PhysicalConstants, WaveFunction};
pub use states::{crossing_amplitude, gaussian, Branch, CrossingAmplitude, GaussianSpec};
pub use wigner::{
    energy_amplitude, epsilon_squared, minimize_uncertainty, minimize_uncertainty_with, tau_from_eta, tau_squared,
    wigner_curve, wigner_curve_with, CurveRow, EnergyAmplitude, EtaProfile, MinUncertaintyState, MomentReport,
    SolverOptions,
};
