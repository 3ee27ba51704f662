use serde::{Deserialize, Serialize};

use super::CircuitError;

/// Coupler orientation. `A`/`B` are horizontal couplers, `C`/`D` vertical;
/// within each direction the two orientations alternate in a staggered
/// (brick) pattern so that each orientation is a matching of the lattice.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    A,
    B,
    C,
    D,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [Orientation::A, Orientation::B, Orientation::C, Orientation::D];

    /// Orientation used by cycle `cycle` (plain repeating `A, B, C, D`).
    pub fn for_cycle(cycle: usize) -> Orientation {
        Self::ALL[cycle % 4]
    }
}

/// A `rows × cols` planar lattice of qubits with row-major indexing.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitGrid {
    rows: usize,
    cols: usize,
}

impl QubitGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self, CircuitError> {
        if rows == 0 || cols == 0 {
            return Err(CircuitError::EmptyGrid);
        }
        rows.checked_mul(cols)
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or(CircuitError::GridTooLarge { rows, cols })?;
        Ok(QubitGrid { rows, cols })
    }

    /// The most nearly square grid holding exactly `n` qubits
    /// (`rows ≤ cols`). Prime `n` gives a `1 × n` chain.
    pub fn near_square(n: usize) -> Result<Self, CircuitError> {
        let mut rows = (n as f64).sqrt().floor() as usize;
        while rows > 1 && !n.is_multiple_of(rows) {
            rows -= 1;
        }
        Self::new(rows.max(1), n / rows.max(1))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols);
        row * self.cols + col
    }

    pub fn coords(&self, qubit: usize) -> (usize, usize) {
        (qubit / self.cols, qubit % self.cols)
    }

    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        let n = self.n_qubits();
        if a >= n || b >= n {
            return false;
        }
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        ra.abs_diff(rb) + ca.abs_diff(cb) == 1
    }

    pub fn neighbors(&self, qubit: usize) -> Vec<usize> {
        let (r, c) = self.coords(qubit);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.index(r - 1, c));
        }
        if c > 0 {
            out.push(self.index(r, c - 1));
        }
        if c + 1 < self.cols {
            out.push(self.index(r, c + 1));
        }
        if r + 1 < self.rows {
            out.push(self.index(r + 1, c));
        }
        out
    }

    /// Couplers of one orientation, each as `(lower index, higher index)`.
    pub fn edges(&self, orientation: Orientation) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match orientation {
            Orientation::A | Orientation::B => {
                let parity = usize::from(orientation == Orientation::B);
                for r in 0..self.rows {
                    for c in 0..self.cols.saturating_sub(1) {
                        if (r + c) % 2 == parity {
                            out.push((self.index(r, c), self.index(r, c + 1)));
                        }
                    }
                }
            }
            Orientation::C | Orientation::D => {
                let parity = usize::from(orientation == Orientation::D);
                for r in 0..self.rows.saturating_sub(1) {
                    for c in 0..self.cols {
                        if (r + c) % 2 == parity {
                            out.push((self.index(r, c), self.index(r + 1, c)));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn all_edges(&self) -> Vec<(usize, usize)> {
        Orientation::ALL.iter().flat_map(|&o| self.edges(o)).collect()
    }

    /// `(rows + cols) / 2`, the stand-in for `√n` that cost formulas use on
    /// non-square grids.
    pub fn effective_sqrt_n(&self) -> f64 {
        (self.rows + self.cols) as f64 / 2.0
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn single_qubit_grid() {
        let g = QubitGrid::new(1, 1).unwrap();
        assert_eq!(g.n_qubits(), 1);
        assert!(g.all_edges().is_empty());
        assert!(g.neighbors(0).is_empty());
    }

    #[test]
    fn two_by_two_has_one_edge_per_orientation() {
        let g = QubitGrid::new(2, 2).unwrap();
        assert_eq!(g.n_qubits(), 4);
        for o in Orientation::ALL {
            assert_eq!(g.edges(o).len(), 1, "{o:?}");
        }
        let all: HashSet<_> = g.all_edges().into_iter().collect();
        let expect: HashSet<_> = [(0, 1), (2, 3), (0, 2), (1, 3)].into_iter().collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(matches!(QubitGrid::new(0, 3), Err(CircuitError::EmptyGrid)));
        assert!(matches!(
            QubitGrid::new(usize::MAX, 2),
            Err(CircuitError::GridTooLarge { .. })
        ));
        // Non-square shapes are fine.
        assert_eq!(QubitGrid::new(7, 8).unwrap().n_qubits(), 56);
    }

    #[test]
    fn eight_by_eight_edges() {
        let g = QubitGrid::new(8, 8).unwrap();
        assert_eq!(g.all_edges().len(), 2 * 8 * 7);
        for o in Orientation::ALL {
            assert_eq!(g.edges(o).len(), 28);
        }
    }

    #[test]
    fn orientations_partition_and_are_matchings() {
        for (rows, cols) in [(2, 2), (3, 4), (5, 5), (4, 7), (1, 6)] {
            let g = QubitGrid::new(rows, cols).unwrap();
            let mut seen = HashSet::new();
            for o in Orientation::ALL {
                let mut touched = HashSet::new();
                for (a, b) in g.edges(o) {
                    assert!(g.are_neighbors(a, b));
                    assert!(touched.insert(a) && touched.insert(b), "{o:?} not a matching");
                    assert!(seen.insert((a, b)), "edge in two orientations");
                }
            }
            let expected = rows * (cols - 1) + (rows - 1) * cols;
            assert_eq!(seen.len(), expected);
        }
    }

    #[test]
    fn neighbor_counts() {
        let g = QubitGrid::new(4, 5).unwrap();
        for q in 0..g.n_qubits() {
            let k = g.neighbors(q).len();
            assert!((2..=4).contains(&k));
        }
    }

    #[test]
    fn near_square_shapes() {
        let g = QubitGrid::near_square(12).unwrap();
        assert_eq!((g.rows(), g.cols()), (3, 4));
        let g = QubitGrid::near_square(16).unwrap();
        assert_eq!((g.rows(), g.cols()), (4, 4));
        let g = QubitGrid::near_square(53).unwrap();
        assert_eq!((g.rows(), g.cols()), (1, 53));
        let g = QubitGrid::near_square(8).unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 4));
    }
}
