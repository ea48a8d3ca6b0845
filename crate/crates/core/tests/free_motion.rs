mod common;

use common::{max_abs_diff, FreeGaussian};
use num_complex::Complex64;
use toa_core::*;

fn setup(x0: f64, p0: f64, sigma: f64) -> (WaveFunction, FreeGaussian) {
    let c = PhysicalConstants::new(1.0, 1.0).unwrap();
    let g = Grid::new(-40.0, 40.0, 1024).unwrap();
    let psi = gaussian(&GaussianSpec::new(x0, p0, sigma).unwrap(), &g, c).unwrap();
    (psi, FreeGaussian::new(x0, p0, sigma, 1.0, 1.0))
}

#[test]
fn kijowski_density_matches_quadrature() {
    let (psi, oracle) = setup(0.0, 10.0, 1.0);
    let times = TimeLattice::new(0.6, 0.2, 5).unwrap();
    let s = kijowski_free(&psi, 10.0, &times).unwrap();
    for (k, t) in times.times().into_iter().enumerate() {
        let exact = oracle.crossing_plus(10.0, t).norm_sqr();
        assert!((s.pi_plus[k] - exact).abs() < 1e-6 * exact, "T={t}: {} vs {exact}", s.pi_plus[k]);
        assert!(s.pi_minus[k] < 1e-20);
    }
}

#[test]
fn kijowski_normalization_and_peak() {
    let (psi, _) = setup(0.0, 10.0, 1.0);
    let times = TimeLattice::spanning(0.0, 2.0, 0.01).unwrap();
    let s = kijowski_free(&psi, 10.0, &times).unwrap();
    assert!((s.total_weight() - 1.0).abs() < 1e-4, "{}", s.total_weight());
    let (t_peak, _) = s.peak(Branch::Plus);
    assert!((t_peak - 1.0).abs() <= times.step() + 1e-12, "{t_peak}");
    assert!(s.pi_plus.iter().chain(&s.pi_minus).all(|&v| v >= 0.0));
}

#[test]
fn free_current_matches_closed_form() {
    let (psi, oracle) = setup(0.0, 10.0, 1.0);
    let evolved = evolve_free(&psi, 1.0);
    for x in [10.0, 10.7, 9.13] {
        let j = current_density(&evolved, x).unwrap();
        let exact = oracle.current(x, 1.0);
        assert!((j - exact).abs() < 1e-6 * exact.abs(), "X={x}: {j} vs {exact}");
    }
}

#[test]
fn covariance_under_time_translation() {
    let (psi, _) = setup(0.0, 10.0, 1.0);
    let times = TimeLattice::spanning(0.0, 2.0, 0.01).unwrap();
    let original = kijowski_free(&psi, 10.0, &times).unwrap();
    let moved = kijowski_free(&evolve_free(&psi, 0.3), 10.0, &times.shifted(-0.3)).unwrap();
    assert!(max_abs_diff(&original.pi_plus, &moved.pi_plus) < 1e-8);
    assert!(max_abs_diff(&original.pi_minus, &moved.pi_minus) < 1e-8);
}

#[test]
fn general_potential_reduces_to_free_motion() {
    let (psi, _) = setup(0.0, 10.0, 1.0);
    let times = TimeLattice::spanning(0.0, 2.0, 0.01).unwrap();
    let free = kijowski_free(&psi, 10.0, &times).unwrap();
    let general = arrival_general(&psi, &Potential::Free, 10.0, &times, 0.01).unwrap();
    assert!(max_abs_diff(&free.pi_plus, &general.pi_plus) < 1e-8);
    assert!(max_abs_diff(&free.pi_minus, &general.pi_minus) < 1e-8);
    assert!(max_abs_diff(&free.j, &general.j) < 1e-8);
}

/// `∫_{x_min}^{X} |ψ|² dx` for the trigonometric interpolant of ψ, which is
/// an exact free solution between the nodes.
fn probability_left_of(psi: &WaveFunction, x: f64) -> f64 {
    let phi = to_momentum(psi);
    let a = psi.grid().x_min();
    let c: Vec<Complex64> = phi.amps.iter().map(|v| v * phi.dp / (2.0 * std::f64::consts::PI).sqrt()).collect();
    let mut total = Complex64::default();
    for (j, cj) in c.iter().enumerate() {
        for (k, ck) in c.iter().enumerate() {
            let q = phi.momenta[j] - phi.momenta[k];
            let w = if j == k {
                Complex64::new(x - a, 0.0)
            } else {
                (Complex64::from_polar(1.0, q * x) - Complex64::from_polar(1.0, q * a)) / Complex64::new(0.0, q)
            };
            total += cj * ck.conj() * w;
        }
    }
    total.re
}

#[test]
fn continuity_equation() {
    let c = PhysicalConstants::new(1.0, 1.0).unwrap();
    let g = Grid::new(-20.0, 20.0, 256).unwrap();
    let psi = gaussian(&GaussianSpec::new(-3.0, 4.0, 1.2).unwrap(), &g, c).unwrap();
    let x = 1.37;
    let (t, h) = (1.0, 1e-3);
    let rate = (probability_left_of(&evolve_free(&psi, t + h), x) - probability_left_of(&evolve_free(&psi, t - h), x)) / (2.0 * h);
    let j = current_density(&evolve_free(&psi, t), x).unwrap();
    assert!((rate + j).abs() < 1e-4 * j.abs(), "{rate} vs {j}");
}

#[test]
fn quasi_monochromatic_limit() {
    let c = PhysicalConstants::new(1.0, 1.0).unwrap();
    let g = Grid::new(-40.0, 40.0, 2048).unwrap();
    // packets focused on X at T = 0, so the width at arrival is σq itself
    let times = TimeLattice::spanning(-1.0, 1.0, 0.002).unwrap();
    let deviations: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|ratio| {
            let sigma_p = ratio * 10.0;
            let spec = GaussianSpec::new(10.0, 10.0, 0.5 / sigma_p).unwrap();
            let psi = gaussian(&spec, &g, c).unwrap();
            kijowski_free(&psi, 10.0, &times).unwrap().flux_deviation()
        })
        .collect();
    assert!(deviations.windows(2).all(|w| w[1] < w[0]), "{deviations:?}");
}

#[test]
fn energy_amplitude_change_of_variables() {
    let (psi, oracle) = setup(0.0, 10.0, 1.0);
    let eta = energy_amplitude(&psi, 10.0, Branch::Plus, 4001).unwrap();
    assert!((eta.norm2() - 1.0).abs() < 1e-4);
    let peak = (1..eta.values.len()).map(|k| eta.values[k].norm_sqr()).fold(0.0, f64::max);
    for k in (1..eta.values.len()).step_by(97) {
        let e = eta.energy(k);
        let p = (2.0 * e).sqrt();
        let exact = oracle.momentum(p).norm_sqr() / p;
        assert!((eta.values[k].norm_sqr() - exact).abs() < 1e-4 * peak, "E={e}");
    }
}

#[test]
fn energy_amplitude_support_and_parseval() {
    let (left, _) = setup(0.0, -10.0, 1.0);
    let eta = energy_amplitude(&left, 0.0, Branch::Plus, 1001).unwrap();
    assert!(eta.values.iter().all(|v| v.norm_sqr() < 1e-30));

    let (psi, _) = setup(0.0, 10.0, 1.0);
    let eta = energy_amplitude(&psi, 10.0, Branch::Plus, 4001).unwrap();
    let times = TimeLattice::spanning(0.0, 2.0, 0.01).unwrap();
    let s = kijowski_free(&psi, 10.0, &times).unwrap();
    assert!((eta.norm2() - s.window_integral(Branch::Plus)).abs() < 1e-4);
    for k in (0..times.len()).step_by(10) {
        let chi = eta.time_amplitude(times.time(k), 1.0);
        assert!((chi.norm_sqr() - s.pi_plus[k]).abs() < 1e-4 * 4.0, "T={}", times.time(k));
    }
}

#[test]
fn expectation_values_of_evolved_packet() {
    let (psi, oracle) = setup(-2.0, 3.0, 0.8);
    let t = 1.5;
    let evolved = evolve_free(&psi, t);
    let mean = expectation(&evolved, Observable::Position).unwrap();
    assert!((mean - (-2.0 + 3.0 * t)).abs() < 1e-10);
    let var = expectation(&evolved, Observable::PositionVariance).unwrap();
    assert!((var - oracle.width2(t)).abs() < 1e-10);
}
