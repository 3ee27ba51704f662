//! Linear cross-entropy benchmarking.
//!
//! `f_xeb = 2^n ⟨p(x)⟩ − 1`, where `p(x)` is the ideal probability of each
//! observed bitstring. Uniform guessing scores 0 and an ideal sampler of a
//! Porter-Thomas circuit scores 1.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::statevec::{CdfSampler, StateVector};

/// Largest qubit count for which `2^n` is handled as an exact `f64` scale.
pub const MAX_QUBITS: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum XebError {
    #[error("no samples")]
    Empty,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("fidelity must be in (0, 1], got {0}")]
    BadTargetFidelity(f64),
    #[error("mixture weight must be in [0, 1], got {0}")]
    BadMixture(f64),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("probability vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{0} qubits is outside the supported range")]
    BadQubitCount(usize),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XebResult {
    pub f_xeb: f64,
    pub std_err: f64,
    pub n_samples: usize,
    pub n_qubits: usize,
}

/// Estimate from the ideal probabilities of the observed bitstrings.
/// `std_err` is `2^n · s / √N` with the `N − 1` sample deviation `s`; it is
/// 0 for a single sample.
pub fn xeb_estimate(ideal_probs_of_observed: &[f64], n: usize) -> Result<XebResult, XebError> {
    if n > MAX_QUBITS {
        return Err(XebError::BadQubitCount(n));
    }
    let len = ideal_probs_of_observed.len();
    if len == 0 {
        return Err(XebError::Empty);
    }
    if let Some(&p) = ideal_probs_of_observed.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(XebError::ProbabilityOutOfRange(p));
    }
    let scale = 2f64.powi(n as i32);
    let count = len as f64;
    let mean = ideal_probs_of_observed.iter().sum::<f64>() / count;
    let std_err = if len > 1 {
        let var = ideal_probs_of_observed.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (count - 1.0);
        scale * var.sqrt() / count.sqrt()
    } else {
        0.0
    };
    Ok(XebResult { f_xeb: scale * mean - 1.0, std_err, n_samples: len, n_qubits: n })
}

/// Estimate averaged over bitstrings and over several circuits of the same
/// width, treating every observed bitstring as one pooled sample.
pub fn xeb_estimate_multi(per_circuit: &[&[f64]], n: usize) -> Result<XebResult, XebError> {
    let pooled: Vec<f64> = per_circuit.iter().flat_map(|c| c.iter().copied()).collect();
    xeb_estimate(&pooled, n)
}

/// Ideal probabilities of `samples` under `state`.
pub fn probabilities_of(state: &StateVector, samples: &[u64]) -> Vec<f64> {
    let amps = state.amplitudes();
    samples
        .iter()
        .map(|&x| amps.get(x as usize).map_or(0.0, |a| a.norm_sqr()))
        .collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub target_fidelity: f64,
    pub n_s: u64,
    pub sigma: f64,
}

/// `n_s = ⌈F⁻²⌉` so that the shot-noise level `n_s^{-1/2}` is at most `F`.
pub fn required_samples(f: f64) -> Result<SamplePlan, XebError> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(XebError::BadTargetFidelity(f));
    }
    let raw = f.powi(-2);
    // Absorb rounding in F⁻² so that exact squares stay exact.
    let n_s = (raw * (1.0 - 1e-12)).ceil().max(1.0);
    if n_s >= u64::MAX as f64 {
        return Err(XebError::BadTargetFidelity(f));
    }
    let n_s = n_s as u64;
    Ok(SamplePlan { target_fidelity: f, n_s, sigma: (n_s as f64).powf(-0.5) })
}

/// Draws from the global-depolarizing mixture `f·|a_x|² + (1 − f)·2^{-n}`.
pub fn depolarized_sampler(state: &StateVector, f: f64, count: usize, seed: u64) -> Result<Vec<u64>, XebError> {
    if !(0.0..=1.0).contains(&f) {
        return Err(XebError::BadMixture(f));
    }
    let sampler = CdfSampler::from_state(state);
    let dim = 1u64 << state.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            if f >= 1.0 || rng.random::<f64>() < f {
                sampler.draw(&mut rng)
            } else {
                rng.random_range(0..dim)
            }
        })
        .collect())
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic Kolmogorov tail probability for `statistic` at this size.
    pub p_value: f64,
    pub n_points: usize,
}

/// Kolmogorov-Smirnov distance between the scaled probabilities `2^n p`
/// and the exponential law `1 − e^{−x}`.
pub fn porter_thomas_test(probs: &[f64]) -> Result<KsResult, XebError> {
    let len = probs.len();
    if len == 0 {
        return Err(XebError::Empty);
    }
    if !len.is_power_of_two() {
        return Err(XebError::NotPowerOfTwo(len));
    }
    let sum: f64 = probs.iter().sum();
    if !((sum - 1.0).abs() <= 1e-8) {
        return Err(XebError::NotNormalized(sum));
    }
    let scale = len as f64;
    let mut xs: Vec<f64> = probs.iter().map(|p| p * scale).collect();
    xs.sort_by(f64::total_cmp);
    let count = len as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-x).exp_m1();
            let above = (i + 1) as f64 / count - cdf;
            let below = cdf - i as f64 / count;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(KsResult { statistic, p_value: ks_p_value(statistic, len), n_points: len })
}

/// `P(D > d)` for a sample of `len` points using the Kolmogorov limit law
/// with the small-sample correction `√N + 0.12 + 0.11/√N`.
pub fn ks_p_value(d: f64, len: usize) -> f64 {
    if len == 0 || d <= 0.0 {
        return 1.0;
    }
    let sn = (len as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = 2.0 * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// One row of the XEB run table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XebRecord {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub f: f64,
    pub n_samples: usize,
    pub f_xeb: f64,
    pub std_err: f64,
}

pub fn write_xeb_csv<W: Write>(records: &[XebRecord], out: W) -> Result<(), XebError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_xeb_csv<R: Read>(input: R) -> Result<Vec<XebRecord>, XebError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
