//! Time and energy moments of a crossing amplitude, and the states that
//! minimize the time spread τ for a fixed energy spread ε about a reference
//! energy E₀.
//!
//! With ε = 1 (the solution only depends on E₀/ε), the minimizer satisfies
//!
//! ```text
//! −ħ² η₀'' + λ' (E − E₀)² η₀ = (τ² + λ') η₀,   η₀(0) = 0,
//! ```
//!
//! on the half line, where the multiplier λ' is tuned until the lowest
//! eigenstate has unit second moment about E₀. The equation is discretized
//! with second-order differences on `[0, E_max]` (Dirichlet at both ends);
//! each lowest eigenpair comes from [`crate::tridiag`], and λ' is found by a
//! safeguarded Newton iteration on `ln λ'`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arrival::TimeLattice;
use crate::band::{accurate_sum, SymBanded};
use crate::error::{Error, Result};
use crate::qgrid::{to_momentum, WaveFunction};
use crate::states::Branch;
use crate::tridiag::SymTridiagonal;

/// Relative magnitude below which a sampled profile counts as vanished.
pub const DECAY_TOLERANCE: f64 = 1e-10;

/// Real energy profile η₀ sampled at `E_i = i·dE`, unit-normalized
/// (`Σ η² dE = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct EtaProfile {
    d_e: f64,
    values: Vec<f64>,
}

impl EtaProfile {
    /// Normalizes `values`. Boundary behaviour is not enforced here; see
    /// [`EtaProfile::check_boundaries`].
    pub fn new(d_e: f64, values: Vec<f64>) -> Result<Self> {
        if !(d_e > 0.0 && d_e.is_finite()) {
            return Err(Error::param("dE", format!("must be positive, got {d_e}")));
        }
        if values.len() < 3 {
            return Err(Error::param("eta", "need at least three samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("eta", "non-finite sample"));
        }
        let norm2 = trapezoid(&values.iter().map(|v| v * v).collect::<Vec<_>>(), d_e);
        if !(norm2 > 0.0) {
            return Err(Error::ZeroWeight);
        }
        let scale = norm2.sqrt().recip();
        Ok(Self {
            d_e,
            values: values.into_iter().map(|v| v * scale).collect(),
        })
    }

    /// Samples `f` on `nodes` points spanning `[0, e_max]`.
    pub fn from_fn(e_max: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::param("nodes", "need at least three"));
        }
        let d_e = e_max / (nodes - 1) as f64;
        Self::new(d_e, (0..nodes).map(|i| f(i as f64 * d_e)).collect())
    }

    pub fn d_e(&self) -> f64 {
        self.d_e
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn energy(&self, i: usize) -> f64 {
        i as f64 * self.d_e
    }

    pub fn e_max(&self) -> f64 {
        self.energy(self.values.len() - 1)
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.energy(i)).collect()
    }

    /// Requires η to vanish (relative to its peak) at E = 0 and at E_max.
    pub fn check_boundaries(&self) -> Result<()> {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let first = self.values[0].abs() / peak;
        let last = self.values[self.values.len() - 1].abs() / peak;
        if first > DECAY_TOLERANCE {
            return Err(Error::Boundary(format!("η(0) is {first:e} of the peak")));
        }
        if last > DECAY_TOLERANCE {
            return Err(Error::Boundary(format!("η(E_max) is {last:e} of the peak")));
        }
        Ok(())
    }

    /// `∫ E η² dE`.
    pub fn mean_energy(&self) -> f64 {
        self.weighted(|e| e)
    }

    /// The profile with its energy axis stretched by `scale`:
    /// `η_s(E) = s^(−1/2) η(E/s)`.
    pub fn dilate(&self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("must be positive, got {scale}")));
        }
        let f = scale.sqrt().recip();
        Self::new(self.d_e * scale, self.values.iter().map(|v| v * f).collect())
    }

    /// Number of sign changes among samples above the decay floor.
    pub fn sign_changes(&self) -> usize {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = peak * DECAY_TOLERANCE;
        let signs: Vec<bool> = self
            .values
            .iter()
            .filter(|v| v.abs() > floor)
            .map(|&v| v > 0.0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn weighted(&self, w: impl Fn(f64) -> f64) -> f64 {
        let integrand: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| w(self.energy(i)) * v * v)
            .collect();
        trapezoid(&integrand, self.d_e)
    }
}

/// Second moments about declared reference values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub tau2: f64,
    pub eps2: f64,
    pub t0: f64,
    pub e0: f64,
}

impl MomentReport {
    pub fn product(&self) -> f64 {
        (self.tau2 * self.eps2).sqrt()
    }
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => (accurate_sum(values.iter().copied()) - 0.5 * (values[0] + values[n - 1])) * h,
    }
}

const SECOND_DIFF: [f64; 4] = [-49.0 / 18.0, 1.5, -0.15, 1.0 / 90.0];
const FIRST_DIFF: [f64; 4] = [0.0, 0.75, -0.15, 1.0 / 60.0];

/// Sample `i` of a profile that vanishes at both ends, continued as an odd
/// function through each end point.
fn reflected(v: &[f64], i: isize) -> f64 {
    let last = v.len() as isize - 1;
    if i < 0 {
        -v[(-i) as usize]
    } else if i > last {
        -v[(2 * last - i) as usize]
    } else {
        v[i as usize]
    }
}

/// Sixth-order central first derivative.
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    (0..v.len() as isize)
        .map(|i| {
            (1..4)
                .map(|k| FIRST_DIFF[k] * (reflected(v, i + k as isize) - reflected(v, i - k as isize)))
                .sum::<f64>()
                / h
        })
        .collect()
}

/// `τ² = ∫|χ|²(t − t₀)² dt / ∫|χ|² dt` by the trapezoid rule. The density
/// `|χ|²` must have dropped below 10⁻⁸ of its peak at both window edges.
pub fn tau_squared(chi: &[Complex64], times: &TimeLattice, t0: f64) -> Result<f64> {
    if chi.len() != times.len() {
        return Err(Error::param(
            "chi",
            format!("{} samples for {} times", chi.len(), times.len()),
        ));
    }
    let density: Vec<f64> = chi.iter().map(|c| c.norm_sqr()).collect();
    let peak = density.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let edge = density[0].max(density[density.len() - 1]) / peak;
    if edge > 1e-8 {
        return Err(Error::NotDecayed { relative: edge });
    }
    let weight = times.integrate(&density);
    let moment: Vec<f64> = density
        .iter()
        .enumerate()
        .map(|(k, d)| d * (times.time(k) - t0).powi(2))
        .collect();
    Ok(times.integrate(&moment) / weight)
}

/// `ε² = ∫ η² (E − E₀)² dE / ∫ η² dE` by the trapezoid rule.
pub fn epsilon_squared(eta: &EtaProfile, e0: f64) -> f64 {
    eta.weighted(|e| (e - e0).powi(2)) / eta.weighted(|_| 1.0)
}

/// `τ² = ħ² ∫ (∂η₀/∂E)² dE / ∫ η₀² dE`. The derivative uses sixth-order
/// central differences, with η continued as an odd function through E = 0
/// and E_max.
pub fn tau_from_eta(eta: &EtaProfile, hbar: f64) -> Result<f64> {
    eta.check_boundaries()?;
    Ok(hbar * hbar * dirichlet_form(eta.values(), eta.d_e()) / eta.weighted(|_| 1.0))
}

fn dirichlet_form(v: &[f64], h: f64) -> f64 {
    let squares: Vec<f64> = derivative(v, h).into_iter().map(|d| d * d).collect();
    trapezoid(&squares, h)
}

/// Complex amplitude η(E) = ⟨E,α|ψ⟩ e^(ipX/ħ) on `E_k = k·dE`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAmplitude {
    pub branch: Branch,
    pub point: f64,
    pub d_e: f64,
    pub values: Vec<Complex64>,
}

impl EnergyAmplitude {
    pub fn energy(&self, k: usize) -> f64 {
        k as f64 * self.d_e
    }

    /// `Σ |η|² dE`.
    pub fn norm2(&self) -> f64 {
        trapezoid(&self.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), self.d_e)
    }

    /// `χ(t) = h^(−1/2) ∫ η(E) e^(−iEt/ħ) dE`, the crossing amplitude of the
    /// freely evolving state at nominal time `t`.
    pub fn time_amplitude(&self, t: f64, hbar: f64) -> Complex64 {
        let n = self.values.len();
        let sum: Complex64 = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                v * Complex64::from_polar(w, -self.energy(k) * t / hbar)
            })
            .sum();
        sum * self.d_e / (2.0 * PI * hbar).sqrt()
    }
}

/// Energy amplitude of `psi0` seen through the crossing state `|u_α⟩` at
/// `point`, on `nodes` energies from zero to an upper bound covering the
/// branch's momentum content. Fails if `Σ|η|²dE` misses the branch
/// probability by more than 10⁻⁴.
pub fn energy_amplitude(psi0: &WaveFunction, point: f64, branch: Branch, nodes: usize) -> Result<EnergyAmplitude> {
    psi0.require_normalized()?;
    psi0.grid().check_inside(point)?;
    if nodes < 3 {
        return Err(Error::param("nodes", "need at least three"));
    }
    let c = psi0.constants();
    let (hbar, mass) = (c.hbar(), c.mass());
    let phi = to_momentum(psi0);
    let branch_probability: f64 = phi
        .momenta
        .iter()
        .zip(&phi.amps)
        .filter(|(p, _)| branch.admits(**p))
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        * phi.dp;
    let peak = phi.amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let p_reach = phi
        .momenta
        .iter()
        .zip(&phi.amps)
        .filter(|(p, a)| branch.admits(**p) && a.norm_sqr() > 1e-20 * peak)
        .map(|(p, _)| p.abs())
        .fold(0.0, f64::max);
    let p_reach = if p_reach > 0.0 { p_reach } else { phi.momenta[0].abs() };
    let e_max = 1.1 * p_reach * p_reach / (2.0 * mass);
    let d_e = e_max / (nodes - 1) as f64;

    let grid = psi0.grid();
    let root = grid.dx() / (2.0 * PI * hbar).sqrt();
    let values = (0..nodes)
        .map(|k| {
            let e = k as f64 * d_e;
            if k == 0 {
                return Complex64::default();
            }
            let p = branch.sign() * (2.0 * mass * e).sqrt();
            // continuum transform of the sampled state at an off-lattice p
            let step = Complex64::from_polar(1.0, -p * grid.dx() / hbar);
            let mut phase = Complex64::from_polar(1.0, -p * grid.x_min() / hbar);
            let mut acc = Complex64::default();
            for a in psi0.amps() {
                acc += a * phase;
                phase *= step;
            }
            let jacobian = (mass / (2.0 * e)).powf(0.25);
            acc * root * jacobian * Complex64::from_polar(1.0, p * point / hbar)
        })
        .collect();
    let amplitude = EnergyAmplitude {
        branch,
        point,
        d_e,
        values,
    };
    let deficit = (amplitude.norm2() - branch_probability).abs();
    if deficit > 1e-4 {
        return Err(Error::LatticeTooCoarse { deficit });
    }
    Ok(amplitude)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub hbar: f64,
    /// Lattice nodes on `[0, E_max]`, both ends included.
    pub nodes: usize,
    /// Convergence threshold on `|ε² − 1|`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `E_max = max(E₀, 0) + span_widths · w`, with `w` the Gaussian width
    /// implied by λ'.
    pub span_widths: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            nodes: 8001,
            tolerance: 1e-8,
            max_iterations: 50,
            span_widths: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinUncertaintyState {
    /// E₀/ε.
    pub ratio: f64,
    pub eta: EtaProfile,
    pub lambda_prime: f64,
    /// Lowest eigenvalue, `τ² + λ'ε²`.
    pub eigenvalue: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub mean_e: f64,
    pub iterations: usize,
    /// Relative residual of the discretized eigen-equation.
    pub residual: f64,
    pub hbar: f64,
}

impl MinUncertaintyState {
    pub fn eps_tau(&self) -> f64 {
        self.epsilon * self.tau
    }

    pub fn mean_e_over_eps(&self) -> f64 {
        self.mean_e / self.epsilon
    }

    /// Moments about `t0 = 0` and `E₀ = ratio` (ε = 1 units).
    pub fn moments(&self) -> MomentReport {
        MomentReport {
            tau2: self.tau * self.tau,
            eps2: self.epsilon * self.epsilon,
            t0: 0.0,
            e0: self.ratio,
        }
    }
}

/// One discretized instance of the half-line problem for a fixed E₀ and
/// lattice.
struct HalfLine {
    e0: f64,
    hbar: f64,
    d_e: f64,
    nodes: usize,
}

struct Solve {
    lambda: f64,
    eigenvalue: f64,
    /// Interior samples, `Σ η² dE = 1`.
    eta: Vec<f64>,
    eps2: f64,
    residual: f64,
}

impl HalfLine {
    fn new(e0: f64, e_max: f64, opts: &SolverOptions) -> Self {
        Self {
            e0,
            hbar: opts.hbar,
            d_e: e_max / (opts.nodes - 1) as f64,
            nodes: opts.nodes,
        }
    }

    fn energy(&self, i: usize) -> f64 {
        i as f64 * self.d_e
    }

    /// Sixth-order operator on the interior nodes, Dirichlet ends imposed by
    /// odd reflection.
    fn operator(&self, lambda: f64) -> SymBanded {
        let m = self.nodes - 2;
        let kinetic = -self.hbar * self.hbar / (self.d_e * self.d_e);
        let mut diag: Vec<f64> = (1..=m).map(|i| lambda * (self.energy(i) - self.e0).powi(2)).collect();
        let mut bands = vec![vec![0.0; m]; 3];
        let last = self.nodes as isize - 1;
        for i in 1..=m as isize {
            for s in -3isize..=3 {
                let (target, sign) = match i + s {
                    t if t < 0 => (-t, -1.0),
                    t if t > last => (2 * last - t, -1.0),
                    t => (t, 1.0),
                };
                if target == 0 || target == last || target > i {
                    continue;
                }
                let c = sign * kinetic * SECOND_DIFF[s.unsigned_abs()];
                let (row, col) = (i as usize - 1, target as usize - 1);
                if row == col {
                    diag[row] += c;
                } else {
                    bands[row - col - 1][col] += c;
                }
            }
        }
        for (k, band) in bands.iter_mut().enumerate() {
            band.truncate(m - k - 1);
        }
        SymBanded { diag, bands }
    }

    /// Lowest eigenpair: the tridiagonal second-order problem picks out the
    /// ground state, inverse iteration with the sixth-order operator refines it.
    fn solve(&self, lambda: f64) -> Result<Solve> {
        let kinetic = self.hbar * self.hbar / (self.d_e * self.d_e);
        let diag = (1..self.nodes - 1)
            .map(|i| 2.0 * kinetic + lambda * (self.energy(i) - self.e0).powi(2))
            .collect();
        let off = vec![-kinetic; self.nodes - 3];
        let coarse = SymTridiagonal::new(diag, off)?.lowest_eigenpair()?;

        let op = self.operator(lambda);
        let scale = coarse.value.abs().max(1.0);
        let mut margin = 1e-6 * scale;
        let factor = loop {
            match op.factor(coarse.value - margin) {
                Ok(f) => break f,
                Err(e) if margin >= scale => return Err(e),
                Err(_) => margin *= 100.0,
            }
        };
        let mut v = coarse.vector;
        let mut settled = false;
        for _ in 0..50 {
            let mut y = factor.solve(&v);
            let norm = accurate_sum(y.iter().map(|a| a * a)).sqrt();
            y.iter_mut().for_each(|a| *a /= norm);
            if y.iter().sum::<f64>() < 0.0 {
                y.iter_mut().for_each(|a| *a = -*a);
            }
            let change = y.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = y;
            if change < 1e-14 {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Error::NonConvergence("eigenvector refinement did not settle".into()));
        }
        let av = op.apply(&v);
        let value = accurate_sum(v.iter().zip(&av).map(|(a, b)| a * b));
        if (value - coarse.value).abs() > 1e-2 * scale {
            return Err(Error::NonConvergence("eigenvector refinement left the ground state".into()));
        }
        let residual = accurate_sum(av.iter().zip(&v).map(|(a, b)| (a - value * b).powi(2))).sqrt() / value.abs().max(1.0);

        let root = self.d_e.sqrt().recip();
        let eta: Vec<f64> = v.iter().map(|a| a * root).collect();
        let eps2 = accurate_sum(
            eta.iter()
                .enumerate()
                .map(|(k, a)| (self.energy(k + 1) - self.e0).powi(2) * a * a),
        ) * self.d_e;
        Ok(Solve {
            lambda,
            eigenvalue: value,
            eta,
            eps2,
            residual,
        })
    }

    /// Finds λ' with `ε²(λ') = 1`; returns the solve and the iteration count.
    fn tune(&self, guess: f64, opts: &SolverOptions) -> Result<(Solve, usize)> {
        let f = |s: f64| -> Result<(f64, Solve)> {
            let solve = self.solve(s.exp())?;
            Ok((solve.eps2 - 1.0, solve))
        };
        // ε² decreases monotonically in λ', so the sign of f orients the bracket
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut s = guess.ln();
        let h = 1e-4;
        for iteration in 1..=opts.max_iterations {
            let (value, solve) = f(s)?;
            if value.abs() < opts.tolerance {
                return Ok((solve, iteration));
            }
            if value > 0.0 {
                lo = lo.max(s);
            } else {
                hi = hi.min(s);
            }
            let slope = (f(s + h)?.0 - f(s - h)?.0) / (2.0 * h);
            let mut next = s - value / slope;
            if !next.is_finite() || slope >= 0.0 {
                next = s + 3.0f64.copysign(value);
            }
            next = next.clamp(s - 3.0, s + 3.0);
            if next <= lo || next >= hi {
                next = if lo.is_finite() && hi.is_finite() {
                    0.5 * (lo + hi)
                } else if lo.is_finite() {
                    lo + 3.0
                } else {
                    hi - 3.0
                };
            }
            s = next;
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonConvergence(format!(
                "Newton iteration failed to bracket λ' for E0/ε = {}",
                self.e0
            )));
        }
        // bisection on the bracket found along the way
        for iteration in 1..=200 {
            let mid = 0.5 * (lo + hi);
            let (value, solve) = f(mid)?;
            if value.abs() < opts.tolerance {
                return Ok((solve, opts.max_iterations + iteration));
            }
            if value > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NonConvergence(format!(
            "bisection on λ' did not reach |ε² − 1| < {} for E0/ε = {}",
            opts.tolerance, self.e0
        )))
    }

    fn tail_decayed(&self, eta: &[f64]) -> bool {
        let peak = eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let start = ((self.nodes as f64) * 0.9) as usize;
        eta[start.min(eta.len())..]
            .iter()
            .all(|v| v.abs() <= DECAY_TOLERANCE * peak)
    }
}

/// Starting λ' for a given E₀/ε: Gaussian limit 1/4 for large ratios, the
/// exact 9/4 at zero, and the linear-wall scaling ~2/(1 + r)³ near −1.
pub fn lambda_guess(ratio: f64) -> f64 {
    let gap = 1.0 + ratio;
    if ratio >= 0.0 {
        0.25 + 2.0 / (gap * gap)
    } else {
        0.25 + 2.0 / (gap * gap * gap)
    }
}

fn span_for(ratio: f64, lambda: f64, opts: &SolverOptions) -> f64 {
    let width = (opts.hbar / (2.0 * lambda.sqrt())).sqrt();
    ratio.max(0.0) + opts.span_widths * width
}

/// Minimum-τ state for E₀/ε = `ratio` with default options.
pub fn minimize_uncertainty(ratio: f64) -> Result<MinUncertaintyState> {
    minimize_uncertainty_with(ratio, &SolverOptions::default(), None)
}

/// Minimum-τ state in ε = 1 units. `guess` seeds λ'; otherwise
/// [`lambda_guess`] is used.
pub fn minimize_uncertainty_with(
    ratio: f64,
    opts: &SolverOptions,
    guess: Option<f64>,
) -> Result<MinUncertaintyState> {
    if !(ratio > -1.0 && ratio.is_finite()) {
        return Err(Error::param(
            "ratio",
            format!("E0/ε must exceed −1, got {ratio}"),
        ));
    }
    if opts.nodes < 5 {
        return Err(Error::param("nodes", "need at least five"));
    }
    let guess = guess.filter(|g| *g > 0.0 && g.is_finite()).unwrap_or_else(|| lambda_guess(ratio));

    // first pass sizes the lattice from the guess, the second from the
    // converged multiplier; the span only grows further if the tail is cut
    let mut iterations = 0;
    let first = HalfLine::new(ratio, span_for(ratio, guess, opts), opts);
    let (solve, n) = first.tune(guess, opts)?;
    iterations += n;
    let mut e_max = span_for(ratio, solve.lambda, opts);
    let mut lambda = solve.lambda;
    for _ in 0..8 {
        let problem = HalfLine::new(ratio, e_max, opts);
        let (solve, n) = problem.tune(lambda, opts)?;
        iterations += n;
        if problem.tail_decayed(&solve.eta) {
            return finish(ratio, &problem, solve, iterations, opts);
        }
        lambda = solve.lambda;
        e_max *= 1.5;
    }
    Err(Error::NonConvergence(format!(
        "profile for E0/ε = {ratio} does not decay inside E_max = {e_max}"
    )))
}

fn finish(
    ratio: f64,
    problem: &HalfLine,
    solve: Solve,
    iterations: usize,
    opts: &SolverOptions,
) -> Result<MinUncertaintyState> {
    let mut values = Vec::with_capacity(problem.nodes);
    values.push(0.0);
    values.extend_from_slice(&solve.eta);
    values.push(0.0);
    let eta = EtaProfile::new(problem.d_e, values)?;
    if eta.sign_changes() != 0 {
        return Err(Error::NonConvergence(format!(
            "lowest eigenvector for E0/ε = {ratio} has a node"
        )));
    }
    let tau2 = tau_from_eta(&eta, opts.hbar)?;
    Ok(MinUncertaintyState {
        ratio,
        lambda_prime: solve.lambda,
        eigenvalue: solve.eigenvalue,
        tau: tau2.sqrt(),
        epsilon: solve.eps2.sqrt(),
        mean_e: eta.mean_energy(),
        iterations,
        residual: solve.residual,
        hbar: opts.hbar,
        eta,
    })
}

#[derive(Debug, Clone)]
pub struct CurveRow {
    pub ratio: f64,
    pub outcome: Result<MinUncertaintyState>,
}

impl CurveRow {
    pub fn converged(&self) -> bool {
        self.outcome.is_ok()
    }
}

/// Ratios `min + k(max − min)/(steps − 1)`; a single step yields `min`.
pub fn sweep_ratios(ratio_min: f64, ratio_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    if !(ratio_min > -1.0) || !ratio_max.is_finite() {
        return Err(Error::param("ratio_min", format!("must exceed −1, got {ratio_min}")));
    }
    if steps == 1 {
        if ratio_max < ratio_min {
            return Err(Error::param("ratio_max", "must not be below ratio_min"));
        }
        return Ok(vec![ratio_min]);
    }
    if !(ratio_max > ratio_min) {
        return Err(Error::param("ratio_max", "must exceed ratio_min"));
    }
    let step = (ratio_max - ratio_min) / (steps - 1) as f64;
    Ok((0..steps).map(|k| ratio_min + k as f64 * step).collect())
}

/// Sweeps E₀/ε; each row is solved independently (in parallel). Rows that
/// fail keep their error.
pub fn wigner_curve(ratio_min: f64, ratio_max: f64, steps: usize) -> Result<Vec<CurveRow>> {
    wigner_curve_with(ratio_min, ratio_max, steps, &SolverOptions::default(), false)
}

/// As [`wigner_curve`]; with `continuation` the rows are solved in order,
/// each seeded with the previous row's multiplier.
pub fn wigner_curve_with(
    ratio_min: f64,
    ratio_max: f64,
    steps: usize,
    opts: &SolverOptions,
    continuation: bool,
) -> Result<Vec<CurveRow>> {
    let ratios = sweep_ratios(ratio_min, ratio_max, steps)?;
    if continuation {
        let mut previous = None;
        Ok(ratios
            .into_iter()
            .map(|ratio| {
                let outcome = minimize_uncertainty_with(ratio, opts, previous);
                previous = outcome.as_ref().ok().map(|s| s.lambda_prime);
                CurveRow { ratio, outcome }
            })
            .collect())
    } else {
        Ok(ratios
            .into_par_iter()
            .map(|ratio| CurveRow {
                ratio,
                outcome: minimize_uncertainty_with(ratio, opts, None),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // η ∝ E e^{−3E²/4}: the odd oscillator ground state with ε² = 1 about 0
    fn odd_ground(e: f64) -> f64 {
        e * (-0.75 * e * e).exp()
    }

    #[test]
    fn profile_normalizes_and_validates() {
        let eta = EtaProfile::from_fn(8.0, 2001, odd_ground).unwrap();
        let norm: f64 = eta.values().iter().map(|v| v * v).sum::<f64>() * eta.d_e();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(eta.check_boundaries().is_ok());
        assert_eq!(eta.sign_changes(), 0);
        let open = EtaProfile::from_fn(8.0, 2001, |e| (-0.5 * (e - 1.0).powi(2)).exp()).unwrap();
        assert!(matches!(tau_from_eta(&open, 1.0), Err(Error::Boundary(_))));
        assert!(matches!(EtaProfile::new(0.1, vec![0.0; 5]), Err(Error::ZeroWeight)));
    }

    #[test]
    fn closed_form_moments() {
        let eta = EtaProfile::from_fn(8.0, 4001, odd_ground).unwrap();
        assert!((epsilon_squared(&eta, 0.0) - 1.0).abs() < 1e-10);
        let tau2 = tau_from_eta(&eta, 1.0).unwrap();
        assert!((tau2 - 2.25).abs() < 1e-9, "{tau2}");
        // ⟨E⟩ = 2/√(πa), a = 3/2
        let mean = eta.mean_energy();
        assert!((mean - 2.0 / (1.5 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn dilation_scales_tau() {
        let eta = EtaProfile::from_fn(8.0, 4001, odd_ground).unwrap();
        let tau2 = tau_from_eta(&eta, 1.0).unwrap();
        let stretched = eta.dilate(2.5).unwrap();
        let tau2s = tau_from_eta(&stretched, 1.0).unwrap();
        assert!((tau2s * 6.25 - tau2).abs() < 1e-12 * tau2);
    }

    #[test]
    fn narrow_profile_has_small_spread() {
        let eta = EtaProfile::from_fn(10.0, 20001, |e| (-(e - 5.0).powi(2) / (2.0 * 1e-4)).exp()).unwrap();
        assert!(epsilon_squared(&eta, 5.0) < 1e-4);
    }

    #[test]
    fn tau_squared_gaussian() {
        let times = TimeLattice::spanning(-8.0, 8.0, 0.01).unwrap();
        let chi: Vec<Complex64> = times
            .times()
            .into_iter()
            .map(|t| Complex64::from_polar((-t * t / 2.0).exp(), 0.3 * t))
            .collect();
        assert!((tau_squared(&chi, &times, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((tau_squared(&chi, &times, 1.0).unwrap() - 1.5).abs() < 1e-12);
        let shifted = times.shifted(2.0);
        assert!((tau_squared(&chi, &shifted, 2.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tau_squared_errors() {
        let times = TimeLattice::spanning(-1.0, 1.0, 0.01).unwrap();
        let wide: Vec<Complex64> = times.times().iter().map(|t| Complex64::new((-t * t).exp(), 0.0)).collect();
        assert!(matches!(tau_squared(&wide, &times, 0.0), Err(Error::NotDecayed { .. })));
        let zero = vec![Complex64::default(); times.len()];
        assert!(matches!(tau_squared(&zero, &times, 0.0), Err(Error::ZeroWeight)));
        assert!(tau_squared(&zero[1..], &times, 0.0).is_err());
    }

    #[test]
    fn guess_is_continuous_at_zero() {
        assert!((lambda_guess(0.0) - 2.25).abs() < 1e-15);
        assert!((lambda_guess(-1e-12) - 2.25).abs() < 1e-9);
        assert!(lambda_guess(-0.99) > 1e6);
    }

    #[test]
    fn ratio_zero_matches_odd_oscillator() {
        let s = minimize_uncertainty(0.0).unwrap();
        assert!((s.lambda_prime - 2.25).abs() < 1e-4, "{}", s.lambda_prime);
        assert!((s.eps_tau() - 1.5).abs() < 1e-5, "{}", s.eps_tau());
        assert!((s.mean_e_over_eps() - 2.0 * (2.0 / (3.0 * PI)).sqrt()).abs() < 1e-5);
        assert!((s.epsilon - 1.0).abs() < 1e-8);
        assert!(s.residual < 1e-8);
        let oracle = EtaProfile::from_fn(s.eta.e_max(), s.eta.len(), odd_ground).unwrap();
        let worst = s
            .eta
            .values()
            .iter()
            .zip(oracle.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn ratio_must_exceed_minus_one() {
        assert!(matches!(minimize_uncertainty(-1.0), Err(Error::InvalidParameter { .. })));
        assert!(minimize_uncertainty(-1.5).is_err());
        assert!(sweep_ratios(-2.0, 0.0, 10).is_err());
        assert!(sweep_ratios(0.0, 0.0, 2).is_err());
        assert_eq!(sweep_ratios(0.0, 0.0, 1).unwrap(), vec![0.0]);
        assert!(sweep_ratios(0.0, 1.0, 0).is_err());
    }
}
