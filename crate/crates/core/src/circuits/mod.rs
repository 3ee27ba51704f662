//! Pseudo-random circuits on a planar qubit grid.
//!
//! A circuit is `m` cycles; each cycle is a layer of single-qubit gates on
//! every qubit followed by a layer of disjoint two-qubit gates on the
//! couplers of one orientation. Cycle `c` uses orientation `c mod 4` in the
//! order `A, B, C, D`.
//!
//! Generation is driven by ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64`, so a `(grid, m, config, seed)` tuple
//! reproduces the same circuit on every platform.

mod grid;
pub mod text;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gates::{self, Gate, SingleQubitKind, TwoQubitKind};

pub use grid::{Orientation, QubitGrid};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("grid {rows}x{cols} overflows the qubit index type")]
    GridTooLarge { rows: usize, cols: usize },
    #[error("circuit needs at least one cycle")]
    NoCycles,
    #[error("single-qubit gate set is empty")]
    EmptyGateSet,
    #[error("cycle {cycle}: single-qubit layer must cover all {n} qubits exactly once")]
    IncompleteLayer { cycle: usize, n: usize },
    #[error("cycle {cycle}: qubit {qubit} appears in more than one two-qubit gate")]
    OverlappingPairs { cycle: usize, qubit: usize },
    #[error("cycle {cycle}: qubits {a} and {b} are not grid neighbors")]
    NotNeighbors { cycle: usize, a: usize, b: usize },
    #[error("cycle {cycle}: gate {gate} has the wrong arity for its layer")]
    WrongLayer { cycle: usize, gate: &'static str },
    #[error("patch count {p} must be between 2 and the number of grid columns ({cols})")]
    BadPatchCount { p: usize, cols: usize },
}

/// Gate set the generator draws from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSetConfig {
    pub single: Vec<SingleQubitKind>,
    pub two_qubit: TwoQubitKind,
}

impl Default for GateSetConfig {
    fn default() -> Self {
        GateSetConfig {
            single: vec![SingleQubitKind::SqrtX, SingleQubitKind::SqrtY, SingleQubitKind::SqrtW],
            two_qubit: TwoQubitKind::Cz,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// One gate per qubit, `singles[q]` acting on qubit `q`.
    pub singles: Vec<SingleQubitKind>,
    pub pairs: Vec<Gate>,
}

impl Cycle {
    /// Gates of this cycle in application order.
    pub fn gates(&self) -> impl Iterator<Item = Gate> + '_ {
        self.singles
            .iter()
            .enumerate()
            .map(|(qubit, &kind)| Gate::Single { kind, qubit })
            .chain(self.pairs.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    grid: QubitGrid,
    cycles: Vec<Cycle>,
    seed: u64,
}

impl Circuit {
    /// Assemble a circuit from explicit cycles, checking every structural
    /// invariant: full single-qubit layers, disjoint neighbor pairs.
    pub fn from_cycles(grid: QubitGrid, cycles: Vec<Cycle>, seed: u64) -> Result<Self, CircuitError> {
        if cycles.is_empty() {
            return Err(CircuitError::NoCycles);
        }
        let n = grid.n_qubits();
        for (ci, cycle) in cycles.iter().enumerate() {
            if cycle.singles.len() != n {
                return Err(CircuitError::IncompleteLayer { cycle: ci, n });
            }
            let mut used = vec![false; n];
            for gate in &cycle.pairs {
                let Gate::Two { qubits: (a, b), .. } = *gate else {
                    return Err(CircuitError::WrongLayer { cycle: ci, gate: gate.kind().name() });
                };
                if !grid.are_neighbors(a, b) {
                    return Err(CircuitError::NotNeighbors { cycle: ci, a, b });
                }
                for q in [a, b] {
                    if std::mem::replace(&mut used[q], true) {
                        return Err(CircuitError::OverlappingPairs { cycle: ci, qubit: q });
                    }
                }
            }
        }
        Ok(Circuit { grid, cycles, seed })
    }

    pub fn grid(&self) -> &QubitGrid {
        &self.grid
    }

    pub fn n_qubits(&self) -> usize {
        self.grid.n_qubits()
    }

    pub fn n_cycles(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Every gate with its cycle index, in application order.
    pub fn gates(&self) -> impl Iterator<Item = (usize, Gate)> + '_ {
        self.cycles
            .iter()
            .enumerate()
            .flat_map(|(ci, cycle)| cycle.gates().map(move |g| (ci, g)))
    }
}

/// Draw a random circuit of `m` cycles on `grid`.
pub fn generate_circuit(
    grid: QubitGrid,
    m: usize,
    config: &GateSetConfig,
    seed: u64,
) -> Result<Circuit, CircuitError> {
    if m == 0 {
        return Err(CircuitError::NoCycles);
    }
    if config.single.is_empty() {
        return Err(CircuitError::EmptyGateSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n_qubits();
    let layers: [Vec<(usize, usize)>; 4] = Orientation::ALL.map(|o| grid.edges(o));

    let cycles = (0..m)
        .map(|c| {
            let singles = (0..n)
                .map(|_| config.single[rng.random_range(0..config.single.len())])
                .collect();
            let pairs = layers[c % 4]
                .iter()
                .map(|&qubits| Gate::Two { kind: config.two_qubit, qubits })
                .collect();
            Cycle { singles, pairs }
        })
        .collect();
    Ok(Circuit { grid, cycles, seed })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub single: usize,
    pub two_qubit: usize,
}

pub fn count_gates(circuit: &Circuit) -> GateCounts {
    circuit.cycles.iter().fold(GateCounts { single: 0, two_qubit: 0 }, |acc, c| GateCounts {
        single: acc.single + c.singles.len(),
        two_qubit: acc.two_qubit + c.pairs.len(),
    })
}

/// A two-qubit gate whose targets sit in different patches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossGate {
    pub cycle: usize,
    pub gate: Gate,
    pub rank: usize,
}

/// A circuit cut into `p` vertical slabs of grid columns.
#[derive(Clone, Debug)]
pub struct PatchDecomposition {
    circuit: Circuit,
    p: usize,
    patch_of: Vec<usize>,
    cross: Vec<CrossGate>,
    internal: Vec<Vec<(usize, Gate)>>,
}

impl PatchDecomposition {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n_patches(&self) -> usize {
        self.p
    }

    pub fn patch_of(&self, qubit: usize) -> usize {
        self.patch_of[qubit]
    }

    pub fn patch_assignment(&self) -> &[usize] {
        &self.patch_of
    }

    /// Qubits of `patch` in ascending global index.
    pub fn patch_qubits(&self, patch: usize) -> Vec<usize> {
        (0..self.patch_of.len()).filter(|&q| self.patch_of[q] == patch).collect()
    }

    pub fn patch_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.p];
        for &pi in &self.patch_of {
            sizes[pi] += 1;
        }
        sizes
    }

    pub fn cross_gates(&self) -> &[CrossGate] {
        &self.cross
    }

    /// Two-qubit gates fully inside `patch`, with cycle indices.
    pub fn internal_gates(&self, patch: usize) -> &[(usize, Gate)] {
        &self.internal[patch]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.cross.iter().map(|g| g.rank).collect()
    }

    /// `∏ r` over cross gates, or `None` if it does not fit in a `u128`.
    pub fn path_count(&self) -> Option<u128> {
        self.cross
            .iter()
            .try_fold(1u128, |acc, g| acc.checked_mul(g.rank as u128))
    }

    /// `log₂ ∏ r`, always finite.
    pub fn log2_path_count(&self) -> f64 {
        self.cross.iter().map(|g| (g.rank as f64).log2()).sum()
    }
}

/// Split `circuit` into `p` contiguous column slabs. Column `c` goes to patch
/// `⌊c·p / cols⌋`, so slab widths differ by at most one column.
pub fn cut_circuit(circuit: &Circuit, p: usize) -> Result<PatchDecomposition, CircuitError> {
    let grid = circuit.grid();
    let cols = grid.cols();
    if p < 2 || p > cols {
        return Err(CircuitError::BadPatchCount { p, cols });
    }
    let patch_of: Vec<usize> = (0..grid.n_qubits())
        .map(|q| grid.coords(q).1 * p / cols)
        .collect();

    let mut rank_cache: HashMap<TwoQubitKind, usize> = HashMap::new();
    let mut cross = Vec::new();
    let mut internal = vec![Vec::new(); p];
    for (ci, cycle) in circuit.cycles().iter().enumerate() {
        for gate in &cycle.pairs {
            let Gate::Two { kind, qubits: (a, b) } = *gate else { unreachable!() };
            if patch_of[a] == patch_of[b] {
                internal[patch_of[a]].push((ci, *gate));
            } else {
                let rank = *rank_cache.entry(kind).or_insert_with(|| gates::schmidt_rank(kind));
                cross.push(CrossGate { cycle: ci, gate: *gate, rank });
            }
        }
    }
    Ok(PatchDecomposition { circuit: circuit.clone(), p, patch_of, cross, internal })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;

    fn grid(r: usize, c: usize) -> QubitGrid {
        QubitGrid::new(r, c).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GateSetConfig::default();
        let a = generate_circuit(grid(2, 2), 4, &cfg, 7).unwrap();
        let b = generate_circuit(grid(2, 2), 4, &cfg, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_circuit(grid(2, 2), 4, &cfg, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generation_is_pinned_across_builds() {
        // Frozen ChaCha8 output for seed 7; a change here means previously
        // published circuits no longer regenerate.
        let c = generate_circuit(grid(2, 2), 2, &GateSetConfig::default(), 7).unwrap();
        let names: Vec<&str> = c.cycles().iter().flat_map(|cy| cy.singles.iter().map(|k| k.name())).collect();
        assert_eq!(
            names,
            ["sqrt_x", "sqrt_x", "sqrt_x", "sqrt_x", "sqrt_x", "sqrt_w", "sqrt_x", "sqrt_w"]
        );
    }

    #[test]
    fn errors() {
        let cfg = GateSetConfig::default();
        assert_eq!(generate_circuit(grid(2, 2), 0, &cfg, 1), Err(CircuitError::NoCycles));
        let empty = GateSetConfig { single: vec![], two_qubit: TwoQubitKind::Cz };
        assert_eq!(generate_circuit(grid(2, 2), 1, &empty, 1), Err(CircuitError::EmptyGateSet));
    }

    #[test]
    fn counts_small() {
        let c = generate_circuit(grid(2, 2), 1, &GateSetConfig::default(), 3).unwrap();
        assert_eq!(count_gates(&c).single, 4);
        assert_eq!(count_gates(&c).two_qubit, 1);
    }

    #[test]
    fn counts_eight_by_eight() {
        let c = generate_circuit(grid(8, 8), 4, &GateSetConfig::default(), 1).unwrap();
        assert_eq!(count_gates(&c), GateCounts { single: 256, two_qubit: 112 });
        for cycle in c.cycles() {
            assert_eq!(cycle.singles.len(), 64);
            assert_eq!(cycle.pairs.len(), 28);
        }
    }

    #[test]
    fn cut_two_by_two() {
        let c = generate_circuit(grid(2, 2), 4, &GateSetConfig::default(), 5).unwrap();
        let d = cut_circuit(&c, 2).unwrap();
        assert_eq!(d.patch_assignment(), &[0, 1, 0, 1]);
        // Horizontal couplers (A and B, cycles 0 and 1) span the column cut.
        let cross: Vec<_> = d.cross_gates().iter().map(|g| (g.cycle, g.gate)).collect();
        assert_eq!(
            cross,
            vec![
                (0, Gate::Two { kind: TwoQubitKind::Cz, qubits: (0, 1) }),
                (1, Gate::Two { kind: TwoQubitKind::Cz, qubits: (2, 3) }),
            ]
        );
        assert_eq!(d.ranks(), vec![2, 2]);
        assert_eq!(d.path_count(), Some(4));
        assert_eq!(d.internal_gates(0).len(), 1);
        assert_eq!(d.internal_gates(1).len(), 1);
    }

    #[test]
    fn cut_rejects_bad_p() {
        let c = generate_circuit(grid(2, 3), 2, &GateSetConfig::default(), 5).unwrap();
        assert!(matches!(cut_circuit(&c, 1), Err(CircuitError::BadPatchCount { .. })));
        assert!(matches!(cut_circuit(&c, 4), Err(CircuitError::BadPatchCount { .. })));
        assert!(cut_circuit(&c, 3).is_ok());
    }

    #[test]
    fn iswap_paths_scale_as_four_to_the_g() {
        let cfg = GateSetConfig { two_qubit: TwoQubitKind::ISwap, ..Default::default() };
        let c = generate_circuit(grid(3, 4), 8, &cfg, 2).unwrap();
        let d = cut_circuit(&c, 2).unwrap();
        let g = d.cross_gates().len() as u32;
        assert!(g > 0);
        assert_eq!(d.path_count(), Some(4u128.pow(g)));
        assert!((d.log2_path_count() - 2.0 * g as f64).abs() < 1e-12);
    }

    #[test]
    fn from_cycles_validates() {
        let g = grid(2, 2);
        let singles = vec![SingleQubitKind::Id; 4];
        let bad_pair = Cycle {
            singles: singles.clone(),
            pairs: vec![Gate::Two { kind: TwoQubitKind::Cz, qubits: (0, 3) }],
        };
        assert!(matches!(
            Circuit::from_cycles(g, vec![bad_pair], 0),
            Err(CircuitError::NotNeighbors { .. })
        ));
        let overlap = Cycle {
            singles: singles.clone(),
            pairs: vec![
                Gate::Two { kind: TwoQubitKind::Cz, qubits: (0, 1) },
                Gate::Two { kind: TwoQubitKind::Cz, qubits: (1, 3) },
            ],
        };
        assert!(matches!(
            Circuit::from_cycles(g, vec![overlap], 0),
            Err(CircuitError::OverlappingPairs { .. })
        ));
        let short = Cycle { singles: vec![SingleQubitKind::Id; 3], pairs: vec![] };
        assert!(matches!(
            Circuit::from_cycles(g, vec![short], 0),
            Err(CircuitError::IncompleteLayer { .. })
        ));
        assert_eq!(Circuit::from_cycles(g, vec![], 0), Err(CircuitError::NoCycles));
    }

    proptest! {
        #[test]
        fn gate_count_law(side in 1usize..9, quarter in 1usize..6, seed in any::<u64>()) {
            let m = 4 * quarter;
            let n = side * side;
            let c = generate_circuit(grid(side, side), m, &GateSetConfig::default(), seed).unwrap();
            let counts = count_gates(&c);
            prop_assert_eq!(counts.single, m * n);
            prop_assert_eq!(counts.two_qubit * 2, m * (n - side));
        }

        #[test]
        fn layers_are_complete_and_disjoint(rows in 1usize..6, cols in 1usize..6, m in 1usize..9, seed in any::<u64>()) {
            let c = generate_circuit(grid(rows, cols), m, &GateSetConfig::default(), seed).unwrap();
            let mut single_hits = vec![0usize; rows * cols];
            for (ci, cycle) in c.cycles().iter().enumerate() {
                let mut used = HashSet::new();
                for g in &cycle.pairs {
                    let Gate::Two { qubits: (a, b), .. } = *g else { unreachable!() };
                    prop_assert!(used.insert(a) && used.insert(b));
                    prop_assert!(c.grid().edges(Orientation::for_cycle(ci)).contains(&(a, b)));
                }
                for (q, _) in cycle.singles.iter().enumerate() {
                    single_hits[q] += 1;
                }
            }
            prop_assert!(single_hits.iter().all(|&h| h == m));
        }

        #[test]
        fn cut_is_sound(rows in 1usize..5, cols in 2usize..7, m in 1usize..9, p in 2usize..5, seed in any::<u64>()) {
            prop_assume!(p <= cols);
            let c = generate_circuit(grid(rows, cols), m, &GateSetConfig::default(), seed).unwrap();
            let d = cut_circuit(&c, p).unwrap();
            let mut from_cut: Vec<(usize, Gate)> = d.cross_gates().iter().map(|g| (g.cycle, g.gate)).collect();
            for patch in 0..p {
                for &(ci, g) in d.internal_gates(patch) {
                    let Gate::Two { qubits: (a, b), .. } = g else { unreachable!() };
                    prop_assert_eq!(d.patch_of(a), patch);
                    prop_assert_eq!(d.patch_of(b), patch);
                    from_cut.push((ci, g));
                }
            }
            for g in d.cross_gates() {
                let Gate::Two { qubits: (a, b), .. } = g.gate else { unreachable!() };
                prop_assert_ne!(d.patch_of(a), d.patch_of(b));
            }
            let mut original: Vec<(usize, Gate)> = c.cycles().iter().enumerate()
                .flat_map(|(ci, cy)| cy.pairs.iter().map(move |&g| (ci, g))).collect();
            let key = |x: &(usize, Gate)| (x.0, x.1.targets());
            from_cut.sort_by_key(key);
            original.sort_by_key(key);
            prop_assert_eq!(from_cut, original);

            let sizes = d.patch_sizes();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            prop_assert!(hi - lo <= rows);
            // Slabs are contiguous in column order.
            for q in 0..rows * cols {
                let (_, col) = c.grid().coords(q);
                if col + 1 < cols {
                    let next = d.patch_of(q + 1);
                    prop_assert!(next == d.patch_of(q) || next == d.patch_of(q) + 1);
                }
            }
        }
    }
}
