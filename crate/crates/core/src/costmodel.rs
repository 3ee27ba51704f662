//! Runtime scalings for quantum sampling and classical simulation.
//!
//! Every dimensionless cost `T` and every wall-clock runtime `R = τ·T` is
//! carried as its base-2 logarithm: exponents reach several thousand bits
//! across the frontier grid.
//!
//! | algorithm | `T(n, m)` |
//! |---|---|
//! | quantum sampling | `m · F⁻²` |
//! | Schrödinger | `m · n · 2^n` |
//! | Schrödinger-Feynman | `2^{k p B m √n} · F · (p 2^{n/p} + min(F⁻², 2^n))` |
//!
//! with `k = 1/2 + 1/p`. Tensor-network cost is a single measured anchor.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::fidmodel::{log2_inverse_fidelity, FidelityParams};

pub const BYTES_PER_AMPLITUDE: f64 = 16.0;

/// Seconds in a Julian year.
pub const YEAR_SECONDS: f64 = 365.25 * 86_400.0;

#[derive(Debug, thiserror::Error)]
pub enum CostError {
    #[error("n and m must be at least 1 (got n = {n}, m = {m})")]
    BadDims { n: usize, m: usize },
    #[error("λ must be positive for a finite threshold, got {0}")]
    NonPositiveLambda(f64),
    #[error("log T_Q must be positive for α, got {0}")]
    DegenerateQuantumCost(f64),
    #[error("patch count must be at least 2, got {0}")]
    BadPatchCount(usize),
    #[error("SFA fidelity must be in (0, 1], got {0}")]
    BadSfaFidelity(f64),
    #[error("profile constant `{name}` must be positive and finite, got {value}")]
    BadConstant { name: &'static str, value: f64 },
    #[error("tensor-network anchor is not enabled in this profile")]
    TnDisabled,
    #[error("tensor-network cost is only anchored at n = {anchor_n}, m = {anchor_m}; got n = {n}, m = {m}")]
    TnOffAnchor { n: usize, m: usize, anchor_n: usize, anchor_m: usize },
    #[error("sample count must be positive, got {0}")]
    BadSamples(f64),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `log₂(2^a + 2^b)` without leaving the log domain.
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

fn check_dims(n: usize, m: usize) -> Result<(), CostError> {
    if n == 0 || m == 0 {
        return Err(CostError::BadDims { n, m });
    }
    Ok(())
}

/// `log₂ T_Q = log₂ m + λ m(3n − √n) + 2γn`.
pub fn t_quantum(n: usize, m: usize, params: &FidelityParams) -> Result<f64, CostError> {
    check_dims(n, m)?;
    Ok((m as f64).log2() + 2.0 * log2_inverse_fidelity(params, n as f64, m as f64))
}

/// `log₂ T_SA = log₂(m n) + n`.
pub fn t_sa(n: usize, m: usize) -> Result<f64, CostError> {
    check_dims(n, m)?;
    Ok((m as f64 * n as f64).log2() + n as f64)
}

/// `log₂` of the Schrödinger state-vector size in bytes.
pub fn sa_log2_memory(n: usize) -> f64 {
    BYTES_PER_AMPLITUDE.log2() + n as f64
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Depth at which Schrödinger and quantum costs cross at this width.
    pub m_th: f64,
    /// Limit of `m_th` as `n → ∞`: `(1 − 2γ)/(3λ)`.
    pub asymptote: f64,
}

/// `m_th(n) = (n(1 − 2γ) + log₂ n) / (λ(3n − √n))`.
pub fn m_threshold(n: usize, params: &FidelityParams) -> Result<Threshold, CostError> {
    if n == 0 {
        return Err(CostError::BadDims { n, m: 1 });
    }
    if !(params.lambda > 0.0) {
        return Err(CostError::NonPositiveLambda(params.lambda));
    }
    let nf = n as f64;
    let m_th = (nf * (1.0 - 2.0 * params.gamma) + nf.log2()) / (params.lambda * (3.0 * nf - nf.sqrt()));
    Ok(Threshold { m_th, asymptote: (1.0 - 2.0 * params.gamma) / (3.0 * params.lambda) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfaCostConfig {
    /// Cut-width constant.
    pub b: f64,
    /// Patch counts to search; `None` means `2..=min(n, 1024)`.
    #[serde(default)]
    pub allowed_p: Option<Vec<usize>>,
}

impl Default for SfaCostConfig {
    fn default() -> Self {
        SfaCostConfig { b: 0.24, allowed_p: None }
    }
}

impl SfaCostConfig {
    /// `k(p) = 1/2 + 1/p`.
    pub fn k(p: usize) -> f64 {
        0.5 + 1.0 / p as f64
    }

    pub fn candidates(&self, n: usize) -> Vec<usize> {
        match &self.allowed_p {
            Some(ps) => ps.iter().copied().filter(|&p| p >= 2).collect(),
            None => (2..=n.clamp(2, 1024)).collect(),
        }
    }
}

/// How the SFA target fidelity is chosen.
#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SfaFidelity {
    /// `F⁻² = p 2^{n/p}` when `n > log₂ p / (1 − 1/p)`, else `F = 1`.
    #[default]
    Optimal,
    /// Match the device fidelity predicted by the fidelity model.
    MatchDevice,
    Fixed(f64),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "Q")]
    Quantum,
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "SFA")]
    Sfa,
    #[serde(rename = "TN")]
    Tn,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Quantum => "Q",
            Algorithm::Sa => "SA",
            Algorithm::Sfa => "SFA",
            Algorithm::Tn => "TN",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub algorithm: Algorithm,
    /// `log₂ T`. For TN this is `log₂` seconds and the matching `τ` is 1.
    pub log2_t: f64,
    pub log2_memory_bytes: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2_fidelity: Option<f64>,
}

impl RuntimeEstimate {
    pub fn memory_bytes(&self) -> f64 {
        self.log2_memory_bytes.exp2()
    }
}

pub fn quantum_estimate(n: usize, m: usize, params: &FidelityParams) -> Result<RuntimeEstimate, CostError> {
    Ok(RuntimeEstimate {
        algorithm: Algorithm::Quantum,
        log2_t: t_quantum(n, m, params)?,
        log2_memory_bytes: f64::NEG_INFINITY,
        p: None,
        log2_fidelity: Some(-log2_inverse_fidelity(params, n as f64, m as f64)),
    })
}

pub fn sa_estimate(n: usize, m: usize) -> Result<RuntimeEstimate, CostError> {
    Ok(RuntimeEstimate {
        algorithm: Algorithm::Sa,
        log2_t: t_sa(n, m)?,
        log2_memory_bytes: sa_log2_memory(n),
        p: None,
        log2_fidelity: None,
    })
}

/// `log₂` of the SFA working set, `16 · 2p · 2^{n/p}` bytes.
pub fn sfa_log2_memory(n: usize, p: usize) -> f64 {
    (BYTES_PER_AMPLITUDE * 2.0 * p as f64).log2() + n as f64 / p as f64
}

pub fn t_sfa(
    n: usize,
    m: usize,
    p: usize,
    params: &FidelityParams,
    config: &SfaCostConfig,
    fidelity: SfaFidelity,
) -> Result<RuntimeEstimate, CostError> {
    check_dims(n, m)?;
    if p < 2 {
        return Err(CostError::BadPatchCount(p));
    }
    let (nf, pf) = (n as f64, p as f64);
    let patch_term = pf.log2() + nf / pf;
    let log2_f = match fidelity {
        SfaFidelity::Optimal => {
            if nf > pf.log2() / (1.0 - 1.0 / pf) {
                -patch_term / 2.0
            } else {
                0.0
            }
        }
        SfaFidelity::MatchDevice => -log2_inverse_fidelity(params, nf, m as f64),
        SfaFidelity::Fixed(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(CostError::BadSfaFidelity(f));
            }
            f.log2()
        }
    };
    let paths = SfaCostConfig::k(p) * pf * config.b * m as f64 * nf.sqrt();
    let work = log2_add(patch_term, (-2.0 * log2_f).min(nf));
    Ok(RuntimeEstimate {
        algorithm: Algorithm::Sfa,
        log2_t: paths + log2_f + work,
        log2_memory_bytes: sfa_log2_memory(n, p),
        p: Some(p),
        log2_fidelity: Some(log2_f),
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SfaChoice {
    Feasible(RuntimeEstimate),
    /// No candidate `p` fits; reports the smallest working set seen.
    Infeasible { min_log2_memory_bytes: f64 },
}

impl SfaChoice {
    pub fn estimate(&self) -> Option<&RuntimeEstimate> {
        match self {
            SfaChoice::Feasible(e) => Some(e),
            SfaChoice::Infeasible { .. } => None,
        }
    }
}

/// Minimum-cost patch count among candidates whose working set fits in
/// `log2_budget_bytes`. Pass `f64::INFINITY` for an unconstrained search.
pub fn optimal_sfa(
    n: usize,
    m: usize,
    params: &FidelityParams,
    config: &SfaCostConfig,
    fidelity: SfaFidelity,
    log2_budget_bytes: f64,
) -> Result<SfaChoice, CostError> {
    Ok(optimal_sfa_pair(n, m, params, config, fidelity, log2_budget_bytes)?.0)
}

/// The memory-constrained optimum together with the unconstrained one.
pub fn optimal_sfa_pair(
    n: usize,
    m: usize,
    params: &FidelityParams,
    config: &SfaCostConfig,
    fidelity: SfaFidelity,
    log2_budget_bytes: f64,
) -> Result<(SfaChoice, Option<RuntimeEstimate>), CostError> {
    check_dims(n, m)?;
    let mut candidates = config.candidates(n);
    candidates.sort_unstable();
    candidates.dedup();
    let mut best: Option<RuntimeEstimate> = None;
    let mut free: Option<RuntimeEstimate> = None;
    let mut min_mem = f64::INFINITY;
    for p in candidates {
        // Under the optimal-F rule log₂ T ≥ k p B m √n, which grows with p,
        // so once it passes both incumbents no larger p can win.
        if fidelity == SfaFidelity::Optimal {
            let floor = SfaCostConfig::k(p) * p as f64 * config.b * m as f64 * (n as f64).sqrt();
            if let (Some(b), Some(f)) = (best, free) {
                if floor > b.log2_t && floor > f.log2_t {
                    break;
                }
            }
        }
        let est = t_sfa(n, m, p, params, config, fidelity)?;
        min_mem = min_mem.min(est.log2_memory_bytes);
        if free.is_none_or(|b| est.log2_t < b.log2_t) {
            free = Some(est);
        }
        if est.log2_memory_bytes <= log2_budget_bytes && best.is_none_or(|b| est.log2_t < b.log2_t) {
            best = Some(est);
        }
    }
    let choice = match best {
        Some(e) => SfaChoice::Feasible(e),
        None => SfaChoice::Infeasible { min_log2_memory_bytes: min_mem },
    };
    Ok((choice, free))
}

/// `α = log T_C / log T_Q − 1`; positive means the quantum cost scales better.
pub fn alpha(log2_tc: f64, log2_tq: f64) -> Result<f64, CostError> {
    if !(log2_tq > 0.0) {
        return Err(CostError::DegenerateQuantumCost(log2_tq));
    }
    Ok(log2_tc / log2_tq - 1.0)
}

/// `log₂ T_BGM = log₂ n + c m²`. Not used for region labels.
pub fn t_bgm(n: usize, m: usize, c: f64) -> Result<f64, CostError> {
    check_dims(n, m)?;
    Ok((n as f64).log2() + c * (m as f64).powi(2))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Measured,
    Assumed,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

impl Constant {
    pub const fn assumed(value: f64) -> Self {
        Constant { value, provenance: Provenance::Assumed }
    }

    pub const fn measured(value: f64) -> Self {
        Constant { value, provenance: Provenance::Measured }
    }
}

/// Measured tensor-network point: `seconds` for `samples` bitstrings at
/// width `n`, depth `m`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TnAnchor {
    pub n: usize,
    pub m: usize,
    pub seconds: f64,
    pub samples: f64,
    pub provenance: Provenance,
    /// Constant `c` for off-anchor scaling `2^{c(m√n − m₀√n₀)}`. Absent
    /// means the anchor is only valid at its own point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolation_c: Option<f64>,
}

impl Default for TnAnchor {
    fn default() -> Self {
        TnAnchor { n: 53, m: 14, seconds: 88.0, samples: 1e6, provenance: Provenance::Measured, extrapolation_c: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareProfile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub tau_q_seconds: Constant,
    pub tau_sa_seconds: Constant,
    pub tau_sfa_seconds: Constant,
    pub memory_bytes: Constant,
    pub cutoff_seconds: Constant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tn_anchor: Option<TnAnchor>,
}

/// Sustained classical throughput behind the default `τ_SA`, `τ_SFA`.
pub const DEFAULT_FLOPS: f64 = 1e15;
/// Floating-point operations per unit of classical cost.
pub const FLOPS_PER_UNIT: f64 = 16.0;

impl Default for HardwareProfile {
    fn default() -> Self {
        let tau_c = FLOPS_PER_UNIT / DEFAULT_FLOPS;
        HardwareProfile {
            label: Some("default".into()),
            tau_q_seconds: Constant::assumed(2e-4),
            tau_sa_seconds: Constant::assumed(tau_c),
            tau_sfa_seconds: Constant::assumed(tau_c),
            memory_bytes: Constant::assumed(2.5e17),
            cutoff_seconds: Constant::assumed(100.0 * YEAR_SECONDS),
            tn_anchor: Some(TnAnchor::default()),
        }
    }
}

impl HardwareProfile {
    pub fn validate(&self) -> Result<(), CostError> {
        let named = [
            ("tau_q_seconds", self.tau_q_seconds.value),
            ("tau_sa_seconds", self.tau_sa_seconds.value),
            ("tau_sfa_seconds", self.tau_sfa_seconds.value),
            ("memory_bytes", self.memory_bytes.value),
            ("cutoff_seconds", self.cutoff_seconds.value),
        ];
        for (name, value) in named {
            if !(value > 0.0 && value.is_finite()) {
                return Err(CostError::BadConstant { name, value });
            }
        }
        if let Some(a) = &self.tn_anchor {
            for (name, value) in [("tn_anchor.seconds", a.seconds), ("tn_anchor.samples", a.samples)] {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(CostError::BadConstant { name, value });
                }
            }
            if a.n == 0 || a.m == 0 {
                return Err(CostError::BadConstant { name: "tn_anchor.n/m", value: 0.0 });
            }
            if let Some(c) = a.extrapolation_c {
                if !c.is_finite() {
                    return Err(CostError::BadConstant { name: "tn_anchor.extrapolation_c", value: c });
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, CostError> {
        let p: HardwareProfile = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn read<R: Read>(input: R) -> Result<Self, CostError> {
        let p: HardwareProfile = serde_json::from_reader(input)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String, CostError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Seconds per unit of cost for `algorithm`; TN estimates are already
    /// in seconds.
    pub fn tau(&self, algorithm: Algorithm) -> f64 {
        match algorithm {
            Algorithm::Quantum => self.tau_q_seconds.value,
            Algorithm::Sa => self.tau_sa_seconds.value,
            Algorithm::Sfa => self.tau_sfa_seconds.value,
            Algorithm::Tn => 1.0,
        }
    }

    pub fn log2_memory_budget(&self) -> f64 {
        self.memory_bytes.value.log2()
    }

    pub fn log2_cutoff(&self) -> f64 {
        self.cutoff_seconds.value.log2()
    }

    /// Whether every constant is tagged as assumed.
    pub fn all_assumed(&self) -> bool {
        [self.tau_q_seconds, self.tau_sa_seconds, self.tau_sfa_seconds, self.memory_bytes, self.cutoff_seconds]
            .iter()
            .all(|c| c.provenance == Provenance::Assumed)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub algorithm: Algorithm,
    pub log2_seconds: f64,
    /// Linear seconds, infinite beyond `f64` range.
    pub seconds: f64,
}

impl Runtime {
    pub fn from_log2(algorithm: Algorithm, log2_seconds: f64) -> Self {
        Runtime { algorithm, log2_seconds, seconds: log2_seconds.exp2() }
    }

    pub fn seconds(&self) -> f64 {
        self.seconds
    }
}

/// `R = τ · T`.
pub fn runtime(profile: &HardwareProfile, estimate: &RuntimeEstimate) -> Runtime {
    Runtime::from_log2(estimate.algorithm, profile.tau(estimate.algorithm).log2() + estimate.log2_t)
}

/// Tensor-network runtime for `samples` bitstrings, linear in the sample
/// count. Away from the anchor point it requires both `allow_extrapolation`
/// and an extrapolation constant in the profile.
pub fn tn_runtime(
    profile: &HardwareProfile,
    n: usize,
    m: usize,
    samples: f64,
    allow_extrapolation: bool,
) -> Result<Runtime, CostError> {
    let anchor = profile.tn_anchor.as_ref().ok_or(CostError::TnDisabled)?;
    if !(samples > 0.0 && samples.is_finite()) {
        return Err(CostError::BadSamples(samples));
    }
    if n == anchor.n && m == anchor.m {
        let seconds = anchor.seconds * samples / anchor.samples;
        return Ok(Runtime { algorithm: Algorithm::Tn, log2_seconds: seconds.log2(), seconds });
    }
    let base = anchor.seconds.log2() + samples.log2() - anchor.samples.log2();
    match (allow_extrapolation, anchor.extrapolation_c) {
        (true, Some(c)) => {
            check_dims(n, m)?;
            let shift = c * (m as f64 * (n as f64).sqrt() - anchor.m as f64 * (anchor.n as f64).sqrt());
            Ok(Runtime::from_log2(Algorithm::Tn, base + shift))
        }
        _ => Err(CostError::TnOffAnchor { n, m, anchor_n: anchor.n, anchor_m: anchor.m }),
    }
}

pub fn tn_estimate(runtime: Runtime) -> RuntimeEstimate {
    RuntimeEstimate {
        algorithm: Algorithm::Tn,
        log2_t: runtime.log2_seconds,
        log2_memory_bytes: f64::NEG_INFINITY,
        p: None,
        log2_fidelity: None,
    }
}
