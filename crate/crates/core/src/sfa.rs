//! Schrödinger-Feynman simulation over a patch decomposition.
//!
//! Every cross gate is replaced by its operator-Schmidt expansion
//! `Σ_k s_k A_k ⊗ B_k`. Fixing one term per cross gate (a *path*) leaves a
//! product of independent patch evolutions, so an amplitude is
//!
//! ```text
//! ⟨x|U|0⟩ = Σ_paths (∏ s_k) ∏_patches ⟨x_patch|ψ_patch(path)⟩
//! ```
//!
//! Patch states are recomputed from scratch for every path. With all paths
//! included the sum reproduces the full amplitude; a seeded subset of paths
//! gives a fractional-fidelity approximation.
//!
//! Paths are accumulated in ascending path-index order, so the serial runner
//! is bit-for-bit reproducible. The parallel runner sums per-thread partials
//! and only agrees with it up to floating-point reassociation.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{CircuitError, PatchDecomposition};
use crate::gates::{self, Gate, Mat2, Mat4, SchmidtTerm};
use crate::statevec::{SimConfig, SimError, StateVector};

/// Largest path enumeration the simulator will attempt.
pub const MAX_PATHS: u64 = 1 << 40;

#[derive(Debug, thiserror::Error)]
pub enum SfaError {
    #[error("the simulator supports 2 or 4 patches, got {0}")]
    UnsupportedPatchCount(usize),
    #[error("Schmidt decomposition needs a two-qubit gate")]
    NotTwoQubit,
    #[error("operator is not unitary (defect {0:e})")]
    NonUnitary(f64),
    #[error("qubit {0} is not a target of the gate")]
    NotATarget(usize),
    #[error("path fraction must be in (0, 1], got {0}")]
    BadFraction(f64),
    #[error("selected path subset is empty")]
    EmptyPathSubset,
    #[error("2^{0:.1} paths is beyond the enumeration limit")]
    TooManyPaths(f64),
    #[error("path digits do not match the cross-gate ranks")]
    BadPath,
    #[error("bitstring {0:#x} out of range")]
    BitstringOutOfRange(u64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Schmidt decomposition of a two-qubit gate with `left_qubit` on the left
/// side of the cut. Terms are sorted by descending weight; their count is
/// the Schmidt rank.
pub fn schmidt_decompose(gate: &Gate, left_qubit: usize) -> Result<Vec<SchmidtTerm>, SfaError> {
    let Gate::Two { kind, qubits: (a, b) } = *gate else {
        return Err(SfaError::NotTwoQubit);
    };
    let m = kind.matrix();
    if left_qubit == a {
        schmidt_decompose_matrix(&m)
    } else if left_qubit == b {
        schmidt_decompose_matrix(&gates::swap_factors(&m))
    } else {
        Err(SfaError::NotATarget(left_qubit))
    }
}

/// Schmidt decomposition of an explicit 4×4 unitary with the high-bit
/// factor on the left.
pub fn schmidt_decompose_matrix(m: &Mat4) -> Result<Vec<SchmidtTerm>, SfaError> {
    let defect = gates::unitarity_defect(m, 4);
    if defect > gates::UNITARY_TOL {
        return Err(SfaError::NonUnitary(defect));
    }
    Ok(gates::operator_schmidt(m))
}

/// One Schmidt term index per cross gate, least significant digit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathIndex {
    pub digits: Vec<usize>,
}

impl PathIndex {
    pub fn from_linear(mut index: u64, ranks: &[usize]) -> Self {
        let digits = ranks
            .iter()
            .map(|&r| {
                let d = (index % r as u64) as usize;
                index /= r as u64;
                d
            })
            .collect();
        PathIndex { digits }
    }

    pub fn to_linear(&self, ranks: &[usize]) -> u64 {
        self.digits
            .iter()
            .zip(ranks)
            .rev()
            .fold(0u64, |acc, (&d, &r)| acc * r as u64 + d as u64)
    }

    fn is_valid(&self, ranks: &[usize]) -> bool {
        self.digits.len() == ranks.len() && self.digits.iter().zip(ranks).all(|(d, r)| d < r)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
enum PatchOp {
    One { q: usize, m: Mat2 },
    Two { a: usize, b: usize, m: Mat4 },
    Cross { cross: usize, side: Side, q: usize },
}

/// Per-patch operation lists compiled from a decomposition.
#[derive(Clone, Debug)]
pub struct SfaPlan {
    n: usize,
    patch_qubits: Vec<Vec<usize>>,
    ops: Vec<Vec<PatchOp>>,
    terms: Vec<Vec<SchmidtTerm>>,
    ranks: Vec<usize>,
    sim: SimConfig,
}

impl SfaPlan {
    pub fn new(decomp: &PatchDecomposition, sim: SimConfig) -> Result<Self, SfaError> {
        let p = decomp.n_patches();
        if p != 2 && p != 4 {
            return Err(SfaError::UnsupportedPatchCount(p));
        }
        let circuit = decomp.circuit();
        let n = circuit.n_qubits();
        let patch_qubits: Vec<Vec<usize>> = (0..p).map(|i| decomp.patch_qubits(i)).collect();
        for qs in &patch_qubits {
            sim.check(qs.len())?;
        }
        let mut local = vec![0usize; n];
        for qs in &patch_qubits {
            for (li, &q) in qs.iter().enumerate() {
                local[q] = li;
            }
        }

        let mut ops: Vec<Vec<PatchOp>> = vec![Vec::new(); p];
        let mut terms = Vec::new();
        let mut ranks = Vec::new();
        for (_, gate) in circuit.gates() {
            match gate {
                Gate::Single { kind, qubit } => {
                    ops[decomp.patch_of(qubit)].push(PatchOp::One { q: local[qubit], m: kind.matrix() });
                }
                Gate::Two { kind, qubits: (a, b) } => {
                    let (pa, pb) = (decomp.patch_of(a), decomp.patch_of(b));
                    if pa == pb {
                        ops[pa].push(PatchOp::Two { a: local[a], b: local[b], m: kind.matrix() });
                    } else {
                        let (left, right) = if pa < pb { (a, b) } else { (b, a) };
                        let t = schmidt_decompose(&gate, left)?;
                        let cross = terms.len();
                        ranks.push(t.len());
                        terms.push(t);
                        ops[decomp.patch_of(left)].push(PatchOp::Cross { cross, side: Side::Left, q: local[left] });
                        ops[decomp.patch_of(right)].push(PatchOp::Cross { cross, side: Side::Right, q: local[right] });
                    }
                }
            }
        }
        Ok(SfaPlan { n, patch_qubits, ops, terms, ranks, sim })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn n_patches(&self) -> usize {
        self.patch_qubits.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn log2_path_count(&self) -> f64 {
        self.ranks.iter().map(|&r| (r as f64).log2()).sum()
    }

    /// Total number of paths, if it is within [`MAX_PATHS`].
    pub fn path_count(&self) -> Result<u64, SfaError> {
        self.ranks
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64).filter(|&v| v <= MAX_PATHS))
            .ok_or(SfaError::TooManyPaths(self.log2_path_count()))
    }

    fn fresh_patches(&self) -> Result<Vec<StateVector>, SfaError> {
        self.patch_qubits
            .iter()
            .map(|qs| StateVector::zero(qs.len(), &self.sim).map_err(SfaError::from))
            .collect()
    }

    /// Evolve every patch along `path` into `patches` and return the path
    /// weight `∏ s_k`.
    fn run_path(&self, path: &PathIndex, patches: &mut [StateVector]) -> f64 {
        for (state, ops) in patches.iter_mut().zip(&self.ops) {
            state.reset();
            for op in ops {
                // Targets were validated when the plan was compiled.
                let _ = match op {
                    PatchOp::One { q, m } => state.apply_matrix1(*q, m),
                    PatchOp::Two { a, b, m } => state.apply_matrix2(*a, *b, m),
                    PatchOp::Cross { cross, side, q } => {
                        let term = &self.terms[*cross][path.digits[*cross]];
                        let m = match side {
                            Side::Left => &term.left,
                            Side::Right => &term.right,
                        };
                        state.apply_matrix1(*q, m)
                    }
                };
            }
        }
        path.digits
            .iter()
            .enumerate()
            .map(|(i, &d)| self.terms[i][d].weight)
            .product()
    }

    /// Split a global bitstring into per-patch local indices.
    fn local_indices(&self, x: u64) -> Vec<usize> {
        self.patch_qubits
            .iter()
            .map(|qs| {
                qs.iter()
                    .enumerate()
                    .fold(0usize, |acc, (li, &q)| acc | (((x >> q) & 1) as usize) << li)
            })
            .collect()
    }
}

/// Patch states and weight for one path.
#[derive(Clone, Debug)]
pub struct PathResult {
    pub patches: Vec<StateVector>,
    pub weight: f64,
}

impl PathResult {
    /// This path's contribution to `⟨x|U|0⟩`.
    pub fn contribution(&self, plan: &SfaPlan, x: u64) -> Complex64 {
        let locals = plan.local_indices(x);
        self.patches
            .iter()
            .zip(locals)
            .fold(Complex64::new(self.weight, 0.0), |acc, (s, li)| acc * s.amplitudes()[li])
    }
}

pub fn simulate_path(plan: &SfaPlan, path: &PathIndex) -> Result<PathResult, SfaError> {
    if !path.is_valid(&plan.ranks) {
        return Err(SfaError::BadPath);
    }
    let mut patches = plan.fresh_patches()?;
    let weight = plan.run_path(path, &mut patches);
    Ok(PathResult { patches, weight })
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum PathSelection {
    All,
    /// `round(fraction · total)` paths drawn uniformly without replacement.
    Fraction { fraction: f64, seed: u64 },
}

impl PathSelection {
    /// Sorted path indices this selection includes.
    pub fn resolve(&self, total: u64) -> Result<Vec<u64>, SfaError> {
        match *self {
            PathSelection::All => Ok((0..total).collect()),
            PathSelection::Fraction { fraction, seed } => {
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(SfaError::BadFraction(fraction));
                }
                let k = (fraction * total as f64).round() as usize;
                if k == 0 {
                    return Err(SfaError::EmptyPathSubset);
                }
                if k as u64 >= total {
                    return Ok((0..total).collect());
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, total as usize, k)
                    .into_iter()
                    .map(|i| i as u64)
                    .collect();
                picked.sort_unstable();
                Ok(picked)
            }
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SfaOptions {
    /// Spread paths over the rayon pool. Results then match the serial run
    /// only to reassociation tolerance.
    pub parallel: bool,
}

/// Amplitude-storage instrumentation for one run.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SfaStats {
    pub paths_evaluated: u64,
    /// Largest number of patch amplitudes held at once by one worker.
    pub peak_patch_amplitudes: usize,
    pub output_amplitudes: usize,
}

#[derive(Clone, Debug)]
pub struct SfaOutput {
    pub amplitudes: Vec<Complex64>,
    pub stats: SfaStats,
}

/// Amplitudes of `bitstrings` summed over the selected paths.
pub fn sfa_amplitudes(
    plan: &SfaPlan,
    bitstrings: &[u64],
    selection: PathSelection,
    options: SfaOptions,
) -> Result<SfaOutput, SfaError> {
    if let Some(&bad) = bitstrings.iter().find(|&&x| plan.n < 64 && x >> plan.n != 0) {
        return Err(SfaError::BitstringOutOfRange(bad));
    }
    let total = plan.path_count()?;
    let paths = selection.resolve(total)?;
    let locals: Vec<Vec<usize>> = bitstrings.iter().map(|&x| plan.local_indices(x)).collect();
    let patch_amps: usize = plan.patch_qubits.iter().map(|qs| 1usize << qs.len()).sum();

    let accumulate = |patches: &mut Vec<StateVector>, acc: &mut Vec<Complex64>, idx: u64| {
        let path = PathIndex::from_linear(idx, &plan.ranks);
        let w = plan.run_path(&path, patches);
        for (out, li) in acc.iter_mut().zip(&locals) {
            let mut v = Complex64::new(w, 0.0);
            for (s, &i) in patches.iter().zip(li) {
                v *= s.amplitudes()[i];
            }
            *out += v;
        }
    };

    let zero = vec![Complex64::new(0.0, 0.0); bitstrings.len()];
    let amplitudes = if options.parallel {
        paths
            .par_iter()
            .try_fold(
                || (plan.fresh_patches(), zero.clone()),
                |(patches, mut acc), &idx| {
                    let mut patches = patches?;
                    accumulate(&mut patches, &mut acc, idx);
                    Ok::<_, SfaError>((Ok(patches), acc))
                },
            )
            .map(|r| r.map(|(_, acc)| acc))
            .try_reduce(
                || zero.clone(),
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )?
    } else {
        let mut patches = plan.fresh_patches()?;
        let mut acc = zero;
        for &idx in &paths {
            accumulate(&mut patches, &mut acc, idx);
        }
        acc
    };

    Ok(SfaOutput {
        amplitudes,
        stats: SfaStats {
            paths_evaluated: paths.len() as u64,
            peak_patch_amplitudes: patch_amps,
            output_amplitudes: bitstrings.len(),
        },
    })
}
