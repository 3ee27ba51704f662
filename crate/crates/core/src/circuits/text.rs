//! Line-oriented circuit text format.
//!
//! ```text
//! 4 2 7
//! # grid 2 2
//! 0 0 sqrt_x
//! 0 1 sqrt_w
//! 0 2 sqrt_y
//! 0 3 sqrt_x
//! 0 0 1 cz
//! 1 0 sqrt_y
//! ...
//! ```
//!
//! The first line is `n m seed`. The optional `# grid rows cols` directive
//! fixes the lattice shape; without it `n` must be a perfect square. Each
//! remaining line is `cycle qubit1 [qubit2] gate_name`. Within a cycle the
//! writer emits the single-qubit layer in qubit order followed by the
//! two-qubit layer. Blank lines and other `#` lines are ignored on input.
//! Writing a parsed file reproduces it byte for byte when it was produced
//! by [`write_circuit`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::gates::{Gate, GateKind, SingleQubitKind};

use super::{Circuit, CircuitError, Cycle, QubitGrid};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header line `n m seed`")]
    MissingHeader,
    #[error("cannot infer grid shape for n = {0}; add a `# grid rows cols` line")]
    UnknownShape(u64),
    #[error("cycle {0} has no gates")]
    MissingCycle(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

pub fn write_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    let grid = circuit.grid();
    let _ = writeln!(out, "{} {} {}", grid.n_qubits(), circuit.n_cycles(), circuit.seed());
    let _ = writeln!(out, "# grid {} {}", grid.rows(), grid.cols());
    for (ci, cycle) in circuit.cycles().iter().enumerate() {
        for (q, kind) in cycle.singles.iter().enumerate() {
            let _ = writeln!(out, "{ci} {q} {}", kind.name());
        }
        for gate in &cycle.pairs {
            if let Gate::Two { kind, qubits: (a, b) } = gate {
                let _ = writeln!(out, "{ci} {a} {b} {}", kind.name());
            }
        }
    }
    out
}

#[derive(Default)]
struct PendingCycle {
    singles: BTreeMap<usize, SingleQubitKind>,
    pairs: Vec<Gate>,
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_line, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .ok_or(ParseError::MissingHeader)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(syntax(header_line, "header must be `n m seed`"));
    }
    let n: u64 = parse_num(toks[0], header_line, "qubit count")?;
    let m: usize = parse_num(toks[1], header_line, "cycle count")?;
    let seed: u64 = parse_num(toks[2], header_line, "seed")?;

    let mut grid: Option<QubitGrid> = None;
    let mut cycles: BTreeMap<usize, PendingCycle> = BTreeMap::new();
    let mut last_cycle = 0usize;

    for (ln, raw) in lines {
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('#') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.first() == Some(&"grid") {
                if toks.len() != 3 {
                    return Err(syntax(ln, "grid directive must be `# grid rows cols`"));
                }
                if grid.is_some() || !cycles.is_empty() {
                    return Err(syntax(ln, "grid directive must precede all gates and appear once"));
                }
                let rows: usize = parse_num(toks[1], ln, "row count")?;
                let cols: usize = parse_num(toks[2], ln, "column count")?;
                let g = QubitGrid::new(rows, cols)?;
                if g.n_qubits() as u64 != n {
                    return Err(syntax(ln, format!("grid {rows}x{cols} does not hold {n} qubits")));
                }
                grid = Some(g);
            }
            continue;
        }

        let toks: Vec<&str> = body.split_whitespace().collect();
        if !(3..=4).contains(&toks.len()) {
            return Err(syntax(ln, "expected `cycle qubit1 [qubit2] gate_name`"));
        }
        let cycle: usize = parse_num(toks[0], ln, "cycle index")?;
        if cycle >= m {
            return Err(syntax(ln, format!("cycle {cycle} out of range (m = {m})")));
        }
        if cycle < last_cycle {
            return Err(syntax(ln, "cycle indices must be non-decreasing"));
        }
        last_cycle = cycle;
        let name = toks[toks.len() - 1];
        let kind: GateKind = name.parse().map_err(|e| syntax(ln, format!("{e}")))?;
        if kind.arity() != toks.len() - 2 {
            return Err(syntax(ln, format!("gate `{name}` takes {} qubit(s)", kind.arity())));
        }
        let qubit = |tok: &str| -> Result<usize, ParseError> {
            let q: u64 = parse_num(tok, ln, "qubit index")?;
            if q >= n {
                return Err(syntax(ln, format!("qubit {q} out of range (n = {n})")));
            }
            Ok(q as usize)
        };
        let pending = cycles.entry(cycle).or_default();
        match kind {
            GateKind::Single(kind) => {
                let q = qubit(toks[1])?;
                if !pending.pairs.is_empty() {
                    return Err(syntax(ln, "single-qubit gate after the two-qubit layer"));
                }
                if pending.singles.insert(q, kind).is_some() {
                    return Err(syntax(ln, format!("qubit {q} has two single-qubit gates in cycle {cycle}")));
                }
            }
            GateKind::Two(kind) => {
                let a = qubit(toks[1])?;
                let b = qubit(toks[2])?;
                pending.pairs.push(Gate::Two { kind, qubits: (a, b) });
            }
        }
    }

    let grid = match grid {
        Some(g) => g,
        None => {
            let side = (n as f64).sqrt().round() as u64;
            if side == 0 || side.checked_mul(side) != Some(n) {
                return Err(ParseError::UnknownShape(n));
            }
            QubitGrid::new(side as usize, side as usize)?
        }
    };
    let n = grid.n_qubits();

    if m == 0 {
        return Err(CircuitError::NoCycles.into());
    }
    let mut built = Vec::with_capacity(cycles.len());
    for ci in 0..m {
        let pending = cycles.remove(&ci).ok_or(ParseError::MissingCycle(ci))?;
        if pending.singles.len() != n {
            return Err(CircuitError::IncompleteLayer { cycle: ci, n }.into());
        }
        built.push(Cycle {
            singles: pending.singles.into_values().collect(),
            pairs: pending.pairs,
        });
    }
    Ok(Circuit::from_cycles(grid, built, seed)?)
}
