//! One function per subcommand. Each computes everything first and writes
//! its files only once the run has produced them.

use std::path::Path;

use serde_json::{json, Value};
use toa_core::{
    arrival_general, kijowski_free, minimize_uncertainty_with, wigner_curve_with, ArrivalSeries, Branch,
    SolverOptions,
};

use crate::config::{Method, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{commit, fmt_f64, summary_path, CsvTable};

pub const FIGURE2_PRESET: &str = include_str!("../presets/figure2.toml");

/// The committed barrier-scattering preset with the arrival point moved to
/// `position`.
pub fn figure2_config(position: f64) -> RunConfig {
    let mut config = RunConfig::from_toml(FIGURE2_PRESET).expect("committed preset parses");
    config.arrival.x = position;
    config
}

/// Runs a configuration and returns the arrival series.
pub fn run_arrival(config: &RunConfig) -> CliResult<ArrivalSeries> {
    let exp = config.build()?;
    let series = match exp.method {
        Method::FreeExact => kijowski_free(&exp.psi0, exp.x, &exp.times),
        Method::SplitOperator => {
            let dt = exp.dt.expect("validated by build");
            arrival_general(&exp.psi0, &exp.potential, exp.x, &exp.times, dt)
        }
    };
    series.map_err(|e| CliError::from_core("arrival", e))
}

pub fn arrival_table(series: &ArrivalSeries) -> CsvTable {
    let mut table = CsvTable::new(&["T", "pi_plus", "pi_minus", "j"]);
    for k in 0..series.times.len() {
        table.push(vec![
            fmt_f64(series.times.time(k)),
            fmt_f64(series.pi_plus[k]),
            fmt_f64(series.pi_minus[k]),
            fmt_f64(series.j[k]),
        ]);
    }
    table
}

pub fn arrival_summary(command: &str, config: &RunConfig, series: &ArrivalSeries) -> Value {
    let peak = |b| {
        let (t, v) = series.peak(b);
        json!({ "T": t, "value": v })
    };
    let j_min = series.j.iter().copied().fold(f64::INFINITY, f64::min);
    let pi_plus_min = series.pi_plus.iter().copied().fold(f64::INFINITY, f64::min);
    json!({
        "command": command,
        "x": series.x,
        "times": {
            "start": series.times.start(),
            "step": series.times.step(),
            "count": series.times.len(),
        },
        "window_integral": {
            "pi_plus": series.window_integral(Branch::Plus),
            "pi_minus": series.window_integral(Branch::Minus),
            "total": series.total_weight(),
        },
        "peak": { "pi_plus": peak(Branch::Plus), "pi_minus": peak(Branch::Minus) },
        "flux_deviation": series.flux_deviation(),
        "min_j": j_min,
        "min_pi_plus": pi_plus_min,
        "config": config,
    })
}

fn json_bytes(value: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json values serialize");
    bytes.push(b'\n');
    bytes
}

fn write_arrival(command: &str, config: &RunConfig, out: &Path) -> CliResult<ArrivalSeries> {
    let series = run_arrival(config)?;
    let csv = arrival_table(&series).to_bytes()?;
    let summary = json_bytes(&arrival_summary(command, config, &series));
    commit(&[(out, csv), (&summary_path(out), summary)])?;
    Ok(series)
}

pub fn cmd_arrival(config_path: &Path, out: &Path) -> CliResult<()> {
    let config = RunConfig::load(config_path)?;
    write_arrival("arrival", &config, out).map(drop)
}

pub fn cmd_figure2(position: f64, out: &Path) -> CliResult<()> {
    if !position.is_finite() {
        return Err(CliError::field("position", format!("must be finite, got {position}")));
    }
    write_arrival("figure2", &figure2_config(position), out).map(drop)
}

/// Sweeps the minimum-uncertainty problem. Rows that fail are written with
/// empty fields and `converged = false`; any such row makes the command
/// fail after the files are written.
pub fn cmd_wigner_curve(ratio_min: f64, ratio_max: f64, steps: usize, out: &Path) -> CliResult<()> {
    let opts = SolverOptions::default();
    let rows = wigner_curve_with(ratio_min, ratio_max, steps, &opts, false)
        .map_err(|e| CliError::from_core("", e))?;
    let mut table = CsvTable::new(&["ratio", "mean_E_over_eps", "eps_tau", "lambda_prime", "iterations", "converged"]);
    let mut failures = Vec::new();
    for row in &rows {
        match &row.outcome {
            Ok(s) => table.push(vec![
                fmt_f64(row.ratio),
                fmt_f64(s.mean_e_over_eps()),
                fmt_f64(s.eps_tau()),
                fmt_f64(s.lambda_prime),
                s.iterations.to_string(),
                "true".into(),
            ]),
            Err(e) => {
                failures.push(json!({ "ratio": row.ratio, "error": e.to_string() }));
                table.push(vec![fmt_f64(row.ratio), String::new(), String::new(), String::new(), String::new(), "false".into()]);
            }
        }
    }
    let summary = json!({
        "command": "wigner-curve",
        "ratio_min": ratio_min,
        "ratio_max": ratio_max,
        "steps": steps,
        "hbar": opts.hbar,
        "nodes": opts.nodes,
        "tolerance": opts.tolerance,
        "converged": rows.len() - failures.len(),
        "failures": failures,
    });
    commit(&[(out, table.to_bytes()?), (&summary_path(out), json_bytes(&summary))])?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{} of {} rows did not converge", failures.len(), rows.len())))
    }
}

/// Solves one ratio and writes the energy profile η(E).
pub fn cmd_wigner_state(ratio: f64, out: &Path) -> CliResult<()> {
    let opts = SolverOptions::default();
    let state = minimize_uncertainty_with(ratio, &opts, None).map_err(|e| CliError::from_core("ratio", e))?;
    let mut table = CsvTable::new(&["E", "eta"]);
    for (i, v) in state.eta.values().iter().enumerate() {
        table.push(vec![fmt_f64(state.eta.energy(i)), fmt_f64(*v)]);
    }
    let summary = json!({
        "command": "wigner-state",
        "ratio": state.ratio,
        "hbar": state.hbar,
        "lambda_prime": state.lambda_prime,
        "eigenvalue": state.eigenvalue,
        "tau": state.tau,
        "epsilon": state.epsilon,
        "eps_tau": state.eps_tau(),
        "mean_E": state.mean_e,
        "mean_E_over_eps": state.mean_e_over_eps(),
        "iterations": state.iterations,
        "residual": state.residual,
        "nodes": state.eta.len(),
        "E_max": state.eta.e_max(),
    });
    commit(&[(out, table.to_bytes()?), (&summary_path(out), json_bytes(&summary))])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_matches_the_barrier_setup() {
        let config = figure2_config(8.0);
        assert_eq!(config.arrival.x, 8.0);
        assert_eq!(config.constants.mass, 0.5);
        let exp = config.build().unwrap();
        assert_eq!(exp.times.len(), 601);
        assert!(!exp.potential.is_free());
    }

    #[test]
    fn out_of_domain_position_is_a_validation_error() {
        let err = run_arrival(&figure2_config(500.0)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().starts_with("arrival.x:"), "{err}");
    }
}
