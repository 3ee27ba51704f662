//! Gate kinds, their matrices, and the operator-Schmidt decomposition of
//! two-qubit gates across a bipartition.
//!
//! Matrices are stored row-major. For a two-qubit gate acting on targets
//! `(a, b)` the 4×4 row/column index is `2·bit_a + bit_b`, i.e. the first
//! target is the high bit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Row-major 2×2 complex matrix.
pub type Mat2 = [Complex64; 4];
/// Row-major 4×4 complex matrix.
pub type Mat4 = [Complex64; 16];

/// Singular values at or below this are treated as zero when counting
/// Schmidt rank.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;

/// Tolerance on `U†U = I` for a matrix to count as unitary.
pub const UNITARY_TOL: f64 = 1e-12;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = c(0.0, 0.0);
const ONE: Complex64 = c(1.0, 0.0);

/// Single-qubit gates available to the circuit generator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleQubitKind {
    Id,
    X,
    H,
    /// `(I − iX)/√2`
    SqrtX,
    /// `(I − iY)/√2`
    SqrtY,
    /// `(I − iW)/√2` with `W = (X + Y)/√2`
    SqrtW,
}

/// Two-qubit entangling gates available to the circuit generator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoQubitKind {
    /// Controlled-Z, Schmidt rank 2.
    Cz,
    /// iSWAP, Schmidt rank 4.
    ISwap,
}

impl SingleQubitKind {
    pub const ALL: [SingleQubitKind; 6] = [
        SingleQubitKind::Id,
        SingleQubitKind::X,
        SingleQubitKind::H,
        SingleQubitKind::SqrtX,
        SingleQubitKind::SqrtY,
        SingleQubitKind::SqrtW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SingleQubitKind::Id => "id",
            SingleQubitKind::X => "x",
            SingleQubitKind::H => "h",
            SingleQubitKind::SqrtX => "sqrt_x",
            SingleQubitKind::SqrtY => "sqrt_y",
            SingleQubitKind::SqrtW => "sqrt_w",
        }
    }

    pub fn matrix(self) -> Mat2 {
        let s = FRAC_1_SQRT_2;
        match self {
            SingleQubitKind::Id => [ONE, ZERO, ZERO, ONE],
            SingleQubitKind::X => [ZERO, ONE, ONE, ZERO],
            SingleQubitKind::H => [c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
            SingleQubitKind::SqrtX => [c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0)],
            SingleQubitKind::SqrtY => [c(s, 0.0), c(-s, 0.0), c(s, 0.0), c(s, 0.0)],
            // (1/√2) [[1, -(1+i)/√2], [(1-i)/√2, 1]]
            SingleQubitKind::SqrtW => [c(s, 0.0), c(-0.5, -0.5), c(0.5, -0.5), c(s, 0.0)],
        }
    }
}

impl TwoQubitKind {
    pub const ALL: [TwoQubitKind; 2] = [TwoQubitKind::Cz, TwoQubitKind::ISwap];

    pub fn name(self) -> &'static str {
        match self {
            TwoQubitKind::Cz => "cz",
            TwoQubitKind::ISwap => "iswap",
        }
    }

    pub fn matrix(self) -> Mat4 {
        let i = c(0.0, 1.0);
        match self {
            TwoQubitKind::Cz => {
                let mut m = [ZERO; 16];
                m[0] = ONE;
                m[5] = ONE;
                m[10] = ONE;
                m[15] = -ONE;
                m
            }
            TwoQubitKind::ISwap => {
                let mut m = [ZERO; 16];
                m[0] = ONE;
                m[4 + 2] = i;
                m[2 * 4 + 1] = i;
                m[15] = ONE;
                m
            }
        }
    }
}

/// Any gate kind that can appear in a circuit.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Single(SingleQubitKind),
    Two(TwoQubitKind),
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Single(k) => k.name(),
            GateKind::Two(k) => k.name(),
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Single(_) => 1,
            GateKind::Two(_) => 2,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown gate name `{0}`")]
pub struct UnknownGate(pub String);

impl FromStr for GateKind {
    type Err = UnknownGate;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SingleQubitKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .map(|&k| GateKind::Single(k))
            .or_else(|| {
                TwoQubitKind::ALL
                    .iter()
                    .find(|k| k.name() == s)
                    .map(|&k| GateKind::Two(k))
            })
            .ok_or_else(|| UnknownGate(s.to_owned()))
    }
}

/// A gate applied to concrete qubits. Two-qubit targets are ordered; the
/// first target is the high bit of the 4×4 matrix index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Single { kind: SingleQubitKind, qubit: usize },
    Two { kind: TwoQubitKind, qubits: (usize, usize) },
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match *self {
            Gate::Single { kind, .. } => GateKind::Single(kind),
            Gate::Two { kind, .. } => GateKind::Two(kind),
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::Single { qubit, .. } => vec![qubit],
            Gate::Two { qubits: (a, b), .. } => vec![a, b],
        }
    }

    pub fn max_target(&self) -> usize {
        match *self {
            Gate::Single { qubit, .. } => qubit,
            Gate::Two { qubits: (a, b), .. } => a.max(b),
        }
    }
}

/// Maximum entry of `|U†U − I|` for a `dim × dim` row-major matrix.
pub fn unitarity_defect(m: &[Complex64], dim: usize) -> f64 {
    assert_eq!(m.len(), dim * dim);
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += m[k * dim + i].conj() * m[k * dim + j];
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

pub fn is_unitary(m: &[Complex64], dim: usize) -> bool {
    unitarity_defect(m, dim) <= UNITARY_TOL
}

/// One term `weight · left ⊗ right` of an operator-Schmidt decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtTerm {
    /// Acts on the left-side qubit.
    pub left: Mat2,
    /// Acts on the right-side qubit.
    pub right: Mat2,
    pub weight: f64,
}

/// Operator-Schmidt decomposition of a 4×4 operator across its two
/// tensor factors: `M = Σ_k s_k A_k ⊗ B_k` with `A_k` acting on the first
/// target (high bit) and `B_k` on the second. Terms come back sorted by
/// descending weight with weights `≤ SCHMIDT_CUTOFF` dropped. The factor
/// matrices have unit Frobenius norm.
pub fn operator_schmidt(m: &Mat4) -> Vec<SchmidtTerm> {
    // Reshuffle: R[(ia, ja), (ib, jb)] = M[(ia, ib), (ja, jb)].
    let reshuffled = Matrix4::from_fn(|row, col| {
        let (ia, ja) = (row >> 1, row & 1);
        let (ib, jb) = (col >> 1, col & 1);
        m[(2 * ia + ib) * 4 + (2 * ja + jb)]
    });
    let svd = reshuffled.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));

    order
        .into_iter()
        .filter(|&k| svd.singular_values[k] > SCHMIDT_CUTOFF)
        .map(|k| {
            let mut left = [ZERO; 4];
            let mut right = [ZERO; 4];
            for idx in 0..4 {
                left[idx] = u[(idx, k)];
                right[idx] = v_t[(k, idx)];
            }
            SchmidtTerm {
                left,
                right,
                weight: svd.singular_values[k],
            }
        })
        .collect()
}

/// Swap the tensor factors of a 4×4 operator: returns `SWAP · M · SWAP`.
pub fn swap_factors(m: &Mat4) -> Mat4 {
    let flip = |i: usize| ((i & 1) << 1) | (i >> 1);
    let mut out = [ZERO; 16];
    for r in 0..4 {
        for col in 0..4 {
            out[flip(r) * 4 + flip(col)] = m[r * 4 + col];
        }
    }
    out
}

/// Kronecker product `a ⊗ b` with `a` on the high bit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [ZERO; 16];
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    out[(2 * ia + ib) * 4 + (2 * ja + jb)] = a[ia * 2 + ja] * b[ib * 2 + jb];
                }
            }
        }
    }
    out
}

/// Operator-Schmidt rank of a two-qubit gate kind.
pub fn schmidt_rank(kind: TwoQubitKind) -> usize {
    operator_schmidt(&kind.matrix()).len()
}
