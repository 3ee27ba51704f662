//! Region classification of the `(n, m)` plane.
//!
//! Each cell compares the quantum runtime `R_Q` with the cheapest feasible
//! classical runtime `R_C` (Schrödinger if its state fits in memory,
//! Schrödinger-Feynman at its memory-feasible optimum, tensor networks at
//! the anchor point). Labels are assigned in this order:
//!
//! 1. `m ≤ min_depth` gives `BELOW_MIN_DEPTH`;
//! 2. `R_C ≤ R_Q` gives the label of the cheapest classical method;
//! 3. `R_Q > cutoff` gives `QUANTUM_INFEASIBLE`;
//! 4. otherwise `QUANTUM_ADVANTAGE`.

mod export;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costmodel::{
    alpha, optimal_sfa_pair, quantum_estimate, runtime, sa_estimate, tn_estimate, tn_runtime, Algorithm, CostError,
    HardwareProfile, SfaChoice, SfaCostConfig, SfaFidelity,
};
use crate::fidmodel::{log2_inverse_fidelity, scale_error, FidError, FidelityParams};

pub use export::{iso_lines, parse_map_csv, trace_boundaries, write_contours_json, write_map_csv, Contours, Polyline, RqContour};

#[derive(Debug, thiserror::Error)]
pub enum FrontierError {
    #[error("axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("axis `{0}` must be strictly increasing and start at 1 or above")]
    BadAxis(&'static str),
    #[error("predicate does not change sign between m = {lo} and m = {hi}")]
    NoCrossing { lo: usize, hi: usize },
    #[error("map CSV: {0}")]
    BadMapCsv(String),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Fid(#[from] FidError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionLabel {
    QuantumAdvantage,
    ClassicalSa,
    ClassicalSfa,
    ClassicalTn,
    QuantumInfeasible,
    BelowMinDepth,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 6] = [
        RegionLabel::QuantumAdvantage,
        RegionLabel::ClassicalSa,
        RegionLabel::ClassicalSfa,
        RegionLabel::ClassicalTn,
        RegionLabel::QuantumInfeasible,
        RegionLabel::BelowMinDepth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::QuantumAdvantage => "QUANTUM_ADVANTAGE",
            RegionLabel::ClassicalSa => "CLASSICAL_SA",
            RegionLabel::ClassicalSfa => "CLASSICAL_SFA",
            RegionLabel::ClassicalTn => "CLASSICAL_TN",
            RegionLabel::QuantumInfeasible => "QUANTUM_INFEASIBLE",
            RegionLabel::BelowMinDepth => "BELOW_MIN_DEPTH",
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(self, RegionLabel::ClassicalSa | RegionLabel::ClassicalSfa | RegionLabel::ClassicalTn)
    }

    fn for_classical(alg: Algorithm) -> RegionLabel {
        match alg {
            Algorithm::Sa => RegionLabel::ClassicalSa,
            Algorithm::Sfa => RegionLabel::ClassicalSfa,
            Algorithm::Tn => RegionLabel::ClassicalTn,
            Algorithm::Quantum => unreachable!("quantum is not a classical method"),
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown region label `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontierConfig {
    #[serde(default)]
    pub sfa: SfaCostConfig,
    #[serde(default)]
    pub sfa_fidelity: SfaFidelity,
    /// Depths `m ≤ min_depth` are excluded.
    #[serde(default = "default_min_depth")]
    pub min_depth: usize,
    /// Use the profile's TN extrapolation constant away from the anchor.
    #[serde(default)]
    pub tn_extrapolate: bool,
}

fn default_min_depth() -> usize {
    5
}

impl Default for FrontierConfig {
    fn default() -> Self {
        FrontierConfig {
            sfa: SfaCostConfig::default(),
            sfa_fidelity: SfaFidelity::Optimal,
            min_depth: default_min_depth(),
            tn_extrapolate: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub m: usize,
    pub label: RegionLabel,
    pub log2_rq_seconds: f64,
    /// Cheapest feasible classical runtime, if any method is feasible.
    pub log2_rc_seconds: Option<f64>,
    pub best_classical: Option<Algorithm>,
    /// `α` against Schrödinger; absent when `T_Q ≤ 1`.
    pub alpha_sa: Option<f64>,
    /// `α` against Schrödinger-Feynman at its memory-unconstrained optimum.
    pub alpha_sfa: Option<f64>,
}

pub fn classify_cell(
    n: usize,
    m: usize,
    params: &FidelityParams,
    profile: &HardwareProfile,
    config: &FrontierConfig,
) -> Result<Cell, FrontierError> {
    let q = quantum_estimate(n, m, params)?;
    let rq = runtime(profile, &q).log2_seconds;
    let budget = profile.log2_memory_budget();

    let mut classical: Vec<(Algorithm, f64)> = Vec::with_capacity(3);
    let sa = sa_estimate(n, m)?;
    if sa.log2_memory_bytes <= budget {
        classical.push((Algorithm::Sa, runtime(profile, &sa).log2_seconds));
    }
    let (sfa, sfa_free) = optimal_sfa_pair(n, m, params, &config.sfa, config.sfa_fidelity, budget)?;
    if let SfaChoice::Feasible(e) = sfa {
        classical.push((Algorithm::Sfa, runtime(profile, &e).log2_seconds));
    }
    if profile.tn_anchor.is_some() {
        // One bitstring per unit of F⁻², as for the quantum device.
        let samples = (2.0 * log2_inverse_fidelity(params, n as f64, m as f64)).exp2();
        if let Ok(r) = tn_runtime(profile, n, m, samples, config.tn_extrapolate) {
            classical.push((Algorithm::Tn, runtime(profile, &tn_estimate(r)).log2_seconds));
        }
    }
    let best = classical.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1));

    let label = if m <= config.min_depth {
        RegionLabel::BelowMinDepth
    } else if let Some((alg, _)) = best.filter(|&(_, rc)| rc <= rq) {
        RegionLabel::for_classical(alg)
    } else if rq > profile.log2_cutoff() {
        RegionLabel::QuantumInfeasible
    } else {
        RegionLabel::QuantumAdvantage
    };

    Ok(Cell {
        n,
        m,
        label,
        log2_rq_seconds: rq,
        log2_rc_seconds: best.map(|b| b.1),
        best_classical: best.map(|b| b.0),
        alpha_sa: alpha(sa.log2_t, q.log2_t).ok(),
        alpha_sfa: sfa_free.and_then(|e| alpha(e.log2_t, q.log2_t).ok()),
    })
}

/// Dense grid of cells, `n`-major: cell `(i, j)` is at `i · m_axis.len() + j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub n_axis: Vec<usize>,
    pub m_axis: Vec<usize>,
    pub cells: Vec<Cell>,
}

impl RegionMap {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * self.m_axis.len() + j]
    }

    pub fn find(&self, n: usize, m: usize) -> Option<&Cell> {
        let i = self.n_axis.binary_search(&n).ok()?;
        let j = self.m_axis.binary_search(&m).ok()?;
        Some(self.cell(i, j))
    }

    pub fn labels(&self) -> Vec<RegionLabel> {
        self.cells.iter().map(|c| c.label).collect()
    }

    pub fn count(&self, label: RegionLabel) -> usize {
        self.cells.iter().filter(|c| c.label == label).count()
    }
}

fn check_axis(axis: &[usize], name: &'static str) -> Result<(), FrontierError> {
    if axis.is_empty() {
        return Err(FrontierError::EmptyAxis(name));
    }
    if axis[0] == 0 || axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FrontierError::BadAxis(name));
    }
    Ok(())
}

pub fn compute_map(
    n_axis: &[usize],
    m_axis: &[usize],
    params: &FidelityParams,
    profile: &HardwareProfile,
    config: &FrontierConfig,
) -> Result<RegionMap, FrontierError> {
    check_axis(n_axis, "n")?;
    check_axis(m_axis, "m")?;
    let cells = n_axis
        .par_iter()
        .flat_map_iter(|&n| m_axis.iter().map(move |&m| (n, m)))
        .map(|(n, m)| classify_cell(n, m, params, profile, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RegionMap { n_axis: n_axis.to_vec(), m_axis: m_axis.to_vec(), cells })
}

/// Widths from `lo` to `hi` in multiplicative steps of `ratio`, rounded to
/// integers and deduplicated; `hi` is always included.
///
/// # Panics
/// If `ratio` is not a finite number above 1.
pub fn geometric_axis(lo: usize, hi: usize, ratio: f64) -> Vec<usize> {
    assert!(ratio > 1.0 && ratio.is_finite(), "axis ratio must exceed 1, got {ratio}");
    let mut out = Vec::new();
    let mut x = lo.max(1) as f64;
    while x.round() as usize <= hi {
        let v = x.round() as usize;
        if out.last() != Some(&v) {
            out.push(v);
        }
        x *= ratio;
    }
    if out.last() != Some(&hi) && hi >= lo {
        out.push(hi);
    }
    out
}

/// `n` from 10 to 10⁴ in steps of 1.05×.
pub fn default_n_axis() -> Vec<usize> {
    geometric_axis(10, 10_000, 1.05)
}

/// `m` from 6 to 1000 in steps of 1.
pub fn default_m_axis() -> Vec<usize> {
    (6..=1000).collect()
}

/// Locate the depth where `pred` changes value between `lo` and `hi`. The
/// result is the midpoint of the bracketing integer depths, so it is within
/// 0.5 of any crossing point between them.
pub fn boundary_bisect(lo: usize, hi: usize, pred: impl Fn(usize) -> bool) -> Result<f64, FrontierError> {
    if lo >= hi {
        return Err(FrontierError::NoCrossing { lo, hi });
    }
    let at_lo = pred(lo);
    if pred(hi) == at_lo {
        return Err(FrontierError::NoCrossing { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1 {
        let mid = a + (b - a) / 2;
        if pred(mid) == at_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a as f64 + 0.5)
}

/// Depth at which Schrödinger overtakes the quantum device at width `n`.
pub fn sa_alpha_boundary(n: usize, params: &FidelityParams, lo: usize, hi: usize) -> Result<f64, FrontierError> {
    boundary_bisect(lo, hi, |m| {
        let tq = crate::costmodel::t_quantum(n, m, params).unwrap_or(f64::INFINITY);
        let ts = crate::costmodel::t_sa(n, m).unwrap_or(f64::INFINITY);
        ts < tq
    })
}

/// Depth at which the quantum runtime passes the profile's cutoff.
pub fn cutoff_boundary(
    n: usize,
    params: &FidelityParams,
    profile: &HardwareProfile,
    lo: usize,
    hi: usize,
) -> Result<f64, FrontierError> {
    let cutoff = profile.log2_cutoff();
    boundary_bisect(lo, hi, |m| {
        quantum_estimate(n, m, params).map_or(true, |q| runtime(profile, &q).log2_seconds > cutoff)
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqrtDepthPoint {
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
    pub log2_seconds: f64,
    pub seconds: f64,
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Quantum runtime along `m = ⌈√n⌉` for each error scale.
pub fn sqrt_depth_curve(
    n_values: &[usize],
    epsilons: &[f64],
    params: &FidelityParams,
    profile: &HardwareProfile,
) -> Result<Vec<SqrtDepthPoint>, FrontierError> {
    let mut out = Vec::with_capacity(n_values.len() * epsilons.len());
    for &epsilon in epsilons {
        let scaled = scale_error(params, epsilon)?;
        for &n in n_values {
            let m = ceil_sqrt(n).max(1);
            let r = runtime(profile, &quantum_estimate(n, m, &scaled)?);
            out.push(SqrtDepthPoint { epsilon, n, m, log2_seconds: r.log2_seconds, seconds: r.seconds });
        }
    }
    Ok(out)
}

/// Error scale at which `R_Q(n, m)` equals the profile cutoff.
pub fn epsilon_at_cutoff(n: usize, m: usize, params: &FidelityParams, profile: &HardwareProfile) -> Result<f64, FrontierError> {
    let base = runtime(profile, &quantum_estimate(n, m, &FidelityParams::new(0.0, 0.0))?).log2_seconds;
    let exponent = 2.0 * log2_inverse_fidelity(params, n as f64, m as f64);
    Ok((profile.log2_cutoff() - base) / exponent)
}
