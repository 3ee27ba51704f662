//! Dense Schrödinger state-vector simulation.
//!
//! Qubit `q` is bit `q` of the basis index, so `|0…01⟩` (qubit 0 set) is
//! index 1. Gate kernels touch independent amplitude pairs (or quadruples)
//! and are split across threads in blocks whose boundaries never separate
//! a pair, so results do not depend on the thread count.

use std::io::{self, Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::Circuit;
use crate::gates::{Gate, Mat2, Mat4};

/// Block size below which kernels stay on the calling thread.
const PAR_MIN_BLOCK: usize = 1 << 14;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the configured cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("gate target {qubit} out of range for {n} qubits")]
    TargetOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate targets must differ (got {0} twice)")]
    RepeatedTarget(usize),
    #[error("amplitude buffer length {0} is not a power of two")]
    BadLength(usize),
    #[error("malformed amplitude dump: {0}")]
    BadDump(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Largest register the simulator will allocate. 26 qubits is 1 GiB of
    /// `Complex64` amplitudes.
    pub max_qubits: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { max_qubits: 26 }
    }
}

impl SimConfig {
    pub fn check(&self, n: usize) -> Result<(), SimError> {
        if n > self.max_qubits {
            Err(SimError::TooManyQubits { n, cap: self.max_qubits })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize, config: &SimConfig) -> Result<Self, SimError> {
        config.check(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(SimError::BadLength(amps.len()));
        }
        Ok(StateVector { n: amps.len().trailing_zeros() as usize, amps })
    }

    /// Reset to `|0…0⟩` without reallocating.
    pub fn reset(&mut self) {
        self.amps.fill(Complex64::new(0.0, 0.0));
        self.amps[0] = Complex64::new(1.0, 0.0);
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `⟨x|ψ⟩`, or `None` when `x ≥ 2^n`.
    pub fn amplitude(&self, x: u64) -> Option<Complex64> {
        usize::try_from(x).ok().and_then(|i| self.amps.get(i)).copied()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), SimError> {
        match *gate {
            Gate::Single { kind, qubit } => self.apply_matrix1(qubit, &kind.matrix()),
            Gate::Two { kind, qubits: (a, b) } => self.apply_matrix2(a, b, &kind.matrix()),
        }
    }

    /// Apply an arbitrary (not necessarily unitary) 2×2 operator.
    pub fn apply_matrix1(&mut self, qubit: usize, m: &Mat2) -> Result<(), SimError> {
        self.check_target(qubit)?;
        apply_1q(&mut self.amps, qubit, m);
        Ok(())
    }

    /// Apply an arbitrary 4×4 operator; `a` is the high bit of its index.
    pub fn apply_matrix2(&mut self, a: usize, b: usize, m: &Mat4) -> Result<(), SimError> {
        self.check_target(a)?;
        self.check_target(b)?;
        if a == b {
            return Err(SimError::RepeatedTarget(a));
        }
        apply_2q(&mut self.amps, a, b, m);
        Ok(())
    }

    fn check_target(&self, qubit: usize) -> Result<(), SimError> {
        if qubit >= self.n {
            Err(SimError::TargetOutOfRange { qubit, n: self.n })
        } else {
            Ok(())
        }
    }
}

fn kernel_1q(chunk: &mut [Complex64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    for base in (0..chunk.len()).step_by(stride << 1) {
        for i in base..base + stride {
            let a0 = chunk[i];
            let a1 = chunk[i + stride];
            chunk[i] = m[0] * a0 + m[1] * a1;
            chunk[i + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

#[inline]
fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1usize << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}

fn kernel_2q(chunk: &mut [Complex64], a: usize, b: usize, m: &Mat4) {
    let (lo, hi) = (a.min(b), a.max(b));
    let (ma, mb) = (1usize << a, 1usize << b);
    for k in 0..chunk.len() / 4 {
        let i00 = insert_zero_bit(insert_zero_bit(k, lo), hi);
        // Order matches the matrix index 2·bit_a + bit_b.
        let idx = [i00, i00 | mb, i00 | ma, i00 | ma | mb];
        let v = idx.map(|i| chunk[i]);
        for (r, &i) in idx.iter().enumerate() {
            let row = &m[r * 4..r * 4 + 4];
            chunk[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

fn apply_1q(amps: &mut [Complex64], q: usize, m: &Mat2) {
    let block = (2usize << q).max(PAR_MIN_BLOCK);
    if amps.len() > block {
        amps.par_chunks_mut(block).for_each(|c| kernel_1q(c, q, m));
    } else {
        kernel_1q(amps, q, m);
    }
}

fn apply_2q(amps: &mut [Complex64], a: usize, b: usize, m: &Mat4) {
    let block = (2usize << a.max(b)).max(PAR_MIN_BLOCK);
    if amps.len() > block {
        amps.par_chunks_mut(block).for_each(|c| kernel_2q(c, a, b, m));
    } else {
        kernel_2q(amps, a, b, m);
    }
}

/// `U|0⟩` for the whole circuit.
pub fn simulate(circuit: &Circuit, config: &SimConfig) -> Result<StateVector, SimError> {
    let mut state = StateVector::zero(circuit.n_qubits(), config)?;
    for (_, gate) in circuit.gates() {
        state.apply_gate(&gate)?;
    }
    Ok(state)
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Clone, Debug)]
pub struct CdfSampler {
    cdf: Vec<f64>,
    last_nonzero: usize,
}

impl CdfSampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf: Vec<f64> = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        CdfSampler { cdf, last_nonzero }
    }

    pub fn from_state(state: &StateVector) -> Self {
        Self::new(&state.probabilities())
    }

    /// Map a uniform draw in `[0, 1)` to an outcome. Flat runs of the CDF
    /// resolve to the lowest index above `u·total`.
    pub fn outcome(&self, u: f64) -> u64 {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let target = u * total;
        let idx = self.cdf.partition_point(|&c| c <= target);
        idx.min(self.last_nonzero) as u64
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.outcome(rng.random::<f64>())
    }
}

/// `count` i.i.d. draws from `|a_x|²`.
pub fn sample(state: &StateVector, count: usize, seed: u64) -> Vec<u64> {
    let sampler = CdfSampler::from_state(state);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampler.draw(&mut rng)).collect()
}

/// Write `n` as a little-endian `u64` followed by `2^n` `(re, im)` pairs of
/// little-endian `f64`.
pub fn write_amplitudes<W: Write>(state: &StateVector, mut out: W) -> Result<(), SimError> {
    out.write_all(&(state.n as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(state.amps.len() * 16);
    for a in &state.amps {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Decode an amplitude dump from bytes. `n` above `config.max_qubits` and
/// any length mismatch are rejected before allocation.
pub fn decode_amplitudes(bytes: &[u8], config: &SimConfig) -> Result<StateVector, SimError> {
    let (head, body) = bytes
        .split_first_chunk::<8>()
        .ok_or_else(|| SimError::BadDump("shorter than the 8-byte header".into()))?;
    let n = u64::from_le_bytes(*head);
    let n = usize::try_from(n)
        .ok()
        .filter(|&n| n <= config.max_qubits)
        .ok_or(SimError::TooManyQubits { n: n.min(usize::MAX as u64) as usize, cap: config.max_qubits })?;
    let expected = 16usize << n;
    if body.len() != expected {
        return Err(SimError::BadDump(format!(
            "expected {expected} payload bytes for n = {n}, found {}",
            body.len()
        )));
    }
    let amps = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok(StateVector { n, amps })
}

pub fn read_amplitudes<R: Read>(mut input: R, config: &SimConfig) -> Result<StateVector, SimError> {
    let mut head = [0u8; 8];
    input.read_exact(&mut head)?;
    let n = u64::from_le_bytes(head);
    if n > config.max_qubits as u64 {
        return Err(SimError::TooManyQubits { n: n as usize, cap: config.max_qubits });
    }
    let mut bytes = head.to_vec();
    input.read_to_end(&mut bytes)?;
    decode_amplitudes(&bytes, config)
}
