use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use rcs_bounds::circuits::text::{parse_circuit, write_circuit};
use rcs_bounds::circuits::{count_gates, cut_circuit, generate_circuit, CircuitError, GateSetConfig, QubitGrid};
use rcs_bounds::costmodel::HardwareProfile;
use rcs_bounds::fidmodel::{
    extrapolate_error, fit, read_dataset_csv, read_trend_csv, ErrorProfile, FidelityParams, FitReport,
};
use rcs_bounds::frontier::{compute_map, geometric_axis, write_contours_json, write_map_csv, FrontierConfig, RegionLabel};
use rcs_bounds::gates::TwoQubitKind;
use rcs_bounds::sfa::{sfa_amplitudes, PathSelection, SfaOptions, SfaPlan};
use rcs_bounds::statevec::{sample, simulate, write_amplitudes, SimConfig, StateVector};
use rcs_bounds::xeb::{depolarized_sampler, porter_thomas_test, probabilities_of, write_xeb_csv, xeb_estimate, XebRecord};

use crate::config::{create_output, open_input, required};
use crate::error::{CliError, CliResult};

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        CliError::config(e)
    }
}

fn parse_two_qubit(s: &str) -> Result<TwoQubitKind, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown two-qubit gate `{s}` (expected cz or i_swap)"))
}

fn grid_from(rows: Option<usize>, cols: Option<usize>, n: Option<usize>) -> CliResult<QubitGrid> {
    match (rows, cols, n) {
        (Some(r), Some(c), None) => Ok(QubitGrid::new(r, c)?),
        (None, None, Some(n)) => Ok(QubitGrid::near_square(n)?),
        (Some(r), Some(c), Some(n)) if r * c == n => Ok(QubitGrid::new(r, c)?),
        _ => Err(CliError::config(anyhow!("give either `rows` and `cols` or `n`"))),
    }
}

fn base_params(fit_report: Option<&PathBuf>, lambda: Option<f64>, gamma: Option<f64>) -> CliResult<FidelityParams> {
    let mut params = match fit_report {
        Some(path) => {
            let report: FitReport = serde_json::from_reader(open_input(path)?)
                .map_err(|e| CliError::config(e).context(format!("reading fit report {}", path.display())))?;
            report.params()
        }
        None => FidelityParams::sycamore(),
    };
    if let Some(l) = lambda {
        params.lambda = l;
    }
    if let Some(g) = gamma {
        params.gamma = g;
    }
    if !(params.lambda.is_finite() && params.gamma.is_finite()) {
        return Err(CliError::config(anyhow!("λ and γ must be finite")));
    }
    Ok(params)
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitArgs {
    /// Fidelity dataset CSV with header `n,m,f_xeb[,weight]`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Where to write the fit report JSON.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub fn cmd_fit(a: FitArgs) -> CliResult<Value> {
    let input = required(a.input, "input")?;
    let out = required(a.out, "out")?;
    let ds = read_dataset_csv(open_input(&input)?)?;
    let report = fit(&ds)?;
    let mut w = create_output(&out)?;
    w.write_all(report.to_json()?.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(json!({
        "command": "fit",
        "lambda": report.lambda,
        "gamma": report.gamma,
        "lambda_std": report.params().lambda_std(),
        "gamma_std": report.params().gamma_std(),
        "residual_rms": report.residual_rms,
        "n_records": report.n_records,
        "out": path_str(&out),
    }))
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateArgs {
    /// Grid rows; use with `--cols`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// Qubit count laid out on the most square grid; alternative to rows/cols.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Cycles per circuit.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Number of random circuits [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuits: Option<usize>,
    /// Bitstrings drawn per sampler and circuit [default: 10000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Base seed; circuit i uses seed + i.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fidelity of the depolarized sampler [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    /// Compare full-path SFA amplitudes with the state vector [default: true].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sfa: Option<bool>,
    /// Refuse SFA comparisons above 2^k paths [default: 20].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_log2_paths: Option<f64>,
    /// Two-qubit gate: cz or i_swap [default: cz].
    #[arg(long, value_parser = parse_two_qubit)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_qubit: Option<TwoQubitKind>,
    /// Where to write the XEB CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub fn cmd_validate(a: ValidateArgs) -> CliResult<Value> {
    let grid = grid_from(a.rows, a.cols, a.n)?;
    let n = grid.n_qubits();
    let m = required(a.m, "m")?;
    let seed = required(a.seed, "seed")?;
    let out = required(a.out, "out")?;
    let circuits = a.circuits.unwrap_or(5);
    let samples = a.samples.unwrap_or(10_000);
    let fidelity = a.fidelity.unwrap_or(0.5);
    let max_log2_paths = a.max_log2_paths.unwrap_or(20.0);
    if circuits == 0 || samples == 0 {
        return Err(CliError::config(anyhow!("`circuits` and `samples` must be positive")));
    }
    let gates = GateSetConfig { two_qubit: a.two_qubit.unwrap_or(TwoQubitKind::Cz), ..GateSetConfig::default() };
    let sim = SimConfig::default();
    sim.check(n)?;

    let mut records = Vec::new();
    let mut sfa_max_diff: Option<f64> = None;
    let (mut ideal_sum, mut depol_sum) = (0.0, 0.0);
    for i in 0..circuits {
        let cseed = seed.wrapping_add(i as u64);
        let circuit = generate_circuit(grid, m, &gates, cseed)?;
        let state = simulate(&circuit, &sim)?;

        let ideal = xeb_estimate(&probabilities_of(&state, &sample(&state, samples, cseed)), n)?;
        let draws = depolarized_sampler(&state, fidelity, samples, cseed.wrapping_add(1 << 32))?;
        let depol = xeb_estimate(&probabilities_of(&state, &draws), n)?;
        ideal_sum += ideal.f_xeb;
        depol_sum += depol.f_xeb;
        for (f, r) in [(1.0, ideal), (fidelity, depol)] {
            records.push(XebRecord { n, m, seed: cseed, f, n_samples: r.n_samples, f_xeb: r.f_xeb, std_err: r.std_err });
        }

        if a.sfa.unwrap_or(true) {
            let plan = SfaPlan::new(&cut_circuit(&circuit, 2)?, sim)?;
            let log2_paths = plan.log2_path_count();
            if log2_paths > max_log2_paths {
                return Err(CliError::resource(anyhow!(
                    "SFA comparison needs 2^{log2_paths:.1} paths, above the limit 2^{max_log2_paths}; pass --sfa false or raise --max-log2-paths"
                )));
            }
            let xs: Vec<u64> = (0..1u64 << n).collect();
            let amps = sfa_amplitudes(&plan, &xs, PathSelection::All, SfaOptions { parallel: true })?.amplitudes;
            let diff = amps.iter().zip(state.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            sfa_max_diff = Some(sfa_max_diff.map_or(diff, |d: f64| d.max(diff)));
        }
    }
    write_xeb_csv(&records, create_output(&out)?)?;
    Ok(json!({
        "command": "validate",
        "n": n,
        "m": m,
        "circuits": circuits,
        "samples": samples,
        "mean_f_xeb_ideal": ideal_sum / circuits as f64,
        "depolarized_fidelity": fidelity,
        "mean_f_xeb_depolarized": depol_sum / circuits as f64,
        "sfa_max_abs_diff": sfa_max_diff,
        "out": path_str(&out),
    }))
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierArgs {
    /// Hardware profile JSON [default: built-in profile].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
    /// Error scale relative to the reference device [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Fit report JSON supplying base λ, γ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<PathBuf>,
    /// Override base λ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Override base γ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Smallest width [default: 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<usize>,
    /// Largest width [default: 10000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Multiplicative width step [default: 1.05].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_ratio: Option<f64>,
    /// Smallest depth [default: 6].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_min: Option<usize>,
    /// Largest depth [default: 1000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    /// Classifier settings; config file only.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifier: Option<FrontierConfig>,
    /// Where to write the region map CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Where to write boundary and runtime contours as JSON.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contours: Option<PathBuf>,
}

pub fn cmd_frontier(a: FrontierArgs) -> CliResult<Value> {
    let out = required(a.out, "out")?;
    let profile = match &a.profile {
        Some(p) => HardwareProfile::read(open_input(p)?).map_err(|e| CliError::from(e).context(format!("profile {}", p.display())))?,
        None => HardwareProfile::default(),
    };
    let base = base_params(a.fit.as_ref(), a.lambda, a.gamma)?;
    let device = ErrorProfile::scaled(&base, a.epsilon.unwrap_or(1.0))?;
    let ratio = a.n_ratio.unwrap_or(1.05);
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(CliError::config(anyhow!("`n_ratio` must exceed 1, got {ratio}")));
    }
    let (n_min, n_max) = (a.n_min.unwrap_or(10), a.n_max.unwrap_or(10_000));
    let (m_min, m_max) = (a.m_min.unwrap_or(6), a.m_max.unwrap_or(1000));
    if n_min == 0 || n_min > n_max || m_min == 0 || m_min > m_max {
        return Err(CliError::config(anyhow!("axis ranges must satisfy 1 ≤ min ≤ max")));
    }
    let n_axis = geometric_axis(n_min, n_max, ratio);
    let m_axis: Vec<usize> = (m_min..=m_max).collect();
    let classifier = a.classifier.unwrap_or_default();
    let map = compute_map(&n_axis, &m_axis, &device.params, &profile, &classifier)?;

    let mut w = create_output(&out)?;
    write_map_csv(&map, &mut w)?;
    w.flush()?;
    if let Some(path) = &a.contours {
        let mut w = create_output(path)?;
        write_contours_json(&map, profile.cutoff_seconds.value, &mut w)?;
        w.flush()?;
    }
    let counts: serde_json::Map<String, Value> =
        RegionLabel::ALL.iter().map(|l| (l.as_str().to_string(), json!(map.count(*l)))).collect();
    Ok(json!({
        "command": "frontier",
        "epsilon": device.epsilon,
        "two_qubit_error": device.two_qubit_error,
        "lambda": device.params.lambda,
        "gamma": device.params.gamma,
        "cells": map.cells.len(),
        "counts": counts,
        "out": path_str(&out),
        "contours": a.contours.as_deref().map(path_str),
    }))
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolateArgs {
    /// Error trend CSV with header `year,two_qubit_error`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_year: Option<f64>,
    /// Year that maps to ε = 1 [default: latest year in the data].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_year: Option<f64>,
    /// Fit report JSON supplying base λ, γ.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Where to write ε and the scaled parameters as JSON.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub fn cmd_extrapolate(a: ExtrapolateArgs) -> CliResult<Value> {
    let input = required(a.input, "input")?;
    let target = required(a.target_year, "target_year")?;
    let out = required(a.out, "out")?;
    let trend = read_trend_csv(open_input(&input)?)?;
    let ex = extrapolate_error(&trend, target, a.reference_year)?;
    let base = base_params(a.fit.as_ref(), a.lambda, a.gamma)?;
    let device = ErrorProfile::scaled(&base, ex.epsilon)?;
    let mut w = create_output(&out)?;
    serde_json::to_writer_pretty(&mut w, &json!({ "extrapolation": ex, "device": device }))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(json!({
        "command": "extrapolate",
        "decay_per_year": ex.decay_per_year,
        "reference_year": ex.reference_year,
        "target_year": ex.target_year,
        "epsilon": ex.epsilon,
        "two_qubit_error": device.two_qubit_error,
        "out": path_str(&out),
    }))
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitGenArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// Qubit count laid out on the most square grid; alternative to rows/cols.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Two-qubit gate: cz or i_swap [default: cz].
    #[arg(long, value_parser = parse_two_qubit)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_qubit: Option<TwoQubitKind>,
    /// Where to write the circuit text.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub fn cmd_circuit_gen(a: CircuitGenArgs) -> CliResult<Value> {
    let grid = grid_from(a.rows, a.cols, a.n)?;
    let m = required(a.m, "m")?;
    let seed = required(a.seed, "seed")?;
    let out = required(a.out, "out")?;
    let gates = GateSetConfig { two_qubit: a.two_qubit.unwrap_or(TwoQubitKind::Cz), ..GateSetConfig::default() };
    let circuit = generate_circuit(grid, m, &gates, seed)?;
    fs::write(&out, write_circuit(&circuit)).map_err(|e| CliError::config(e).context(format!("writing {}", out.display())))?;
    let counts = count_gates(&circuit);
    Ok(json!({
        "command": "circuit-gen",
        "rows": grid.rows(),
        "cols": grid.cols(),
        "n": grid.n_qubits(),
        "m": m,
        "seed": seed,
        "single_qubit_gates": counts.single,
        "two_qubit_gates": counts.two_qubit,
        "out": path_str(&out),
    }))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sa,
    Sfa,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Circuit text file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit: Option<PathBuf>,
    /// Simulator [default: sa].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// SFA patch count, 2 or 4 [default: 2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patches: Option<usize>,
    /// Fraction of SFA paths to sum [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    /// Required when sampling or summing a path subset.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Bitstrings to draw from the output state [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Where to write drawn bitstrings as CSV `x,p`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_out: Option<PathBuf>,
    /// Largest register to allocate [default: 26].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_qubits: Option<usize>,
    /// Where to write the binary amplitude dump.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub fn cmd_simulate(a: SimulateArgs) -> CliResult<Value> {
    let circuit_path = required(a.circuit, "circuit")?;
    let out = required(a.out, "out")?;
    let text = fs::read_to_string(&circuit_path)
        .map_err(|e| CliError::config(e).context(format!("reading {}", circuit_path.display())))?;
    let circuit = parse_circuit(&text).map_err(|e| CliError::config(e).context(format!("parsing {}", circuit_path.display())))?;
    let n = circuit.n_qubits();
    let sim = SimConfig { max_qubits: a.max_qubits.unwrap_or(SimConfig::default().max_qubits) };
    sim.check(n)?;
    let samples = a.samples.unwrap_or(0);
    if samples > 0 && a.samples_out.is_none() {
        return Err(CliError::config(anyhow!("`samples` needs `samples_out`")));
    }
    let method = a.method.unwrap_or(Method::Sa);
    let fraction = a.fraction.unwrap_or(1.0);

    let mut paths = None;
    let state = match method {
        Method::Sa => {
            if a.fraction.is_some() || a.patches.is_some() {
                return Err(CliError::config(anyhow!("`fraction` and `patches` apply to --method sfa only")));
            }
            simulate(&circuit, &sim)?
        }
        Method::Sfa => {
            let plan = SfaPlan::new(&cut_circuit(&circuit, a.patches.unwrap_or(2))?, sim)?;
            let selection = if fraction == 1.0 {
                PathSelection::All
            } else {
                PathSelection::Fraction { fraction, seed: required(a.seed, "seed")? }
            };
            let xs: Vec<u64> = (0..1u64 << n).collect();
            let result = sfa_amplitudes(&plan, &xs, selection, SfaOptions { parallel: true })?;
            paths = Some(result.stats.paths_evaluated);
            StateVector::from_amplitudes(result.amplitudes)?
        }
    };
    let mut w = create_output(&out)?;
    write_amplitudes(&state, &mut w)?;
    w.flush()?;

    let norm = state.norm_sqr();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::numeric(anyhow!("output state has norm {norm}")));
    }
    let probs: Vec<f64> = state.probabilities().iter().map(|p| p / norm).collect();
    let ks = porter_thomas_test(&probs)?;
    if samples > 0 {
        let seed = required(a.seed, "seed")?;
        let draws = sample(&state, samples, seed);
        let path = a.samples_out.as_ref().expect("checked above");
        let mut w = create_output(path)?;
        writeln!(w, "x,p")?;
        for (x, p) in draws.iter().zip(probabilities_of(&state, &draws)) {
            writeln!(w, "{x},{}", p / norm)?;
        }
        w.flush()?;
    }
    Ok(json!({
        "command": "simulate",
        "n": n,
        "m": circuit.n_cycles(),
        "method": method,
        "paths_evaluated": paths,
        "norm": norm,
        "porter_thomas_ks": ks.statistic,
        "porter_thomas_p": ks.p_value,
        "samples": samples,
        "out": path_str(&out),
        "samples_out": a.samples_out.as_deref().map(path_str),
    }))
}
