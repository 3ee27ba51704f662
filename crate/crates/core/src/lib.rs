//! Runtime frontiers for random circuit sampling.
//!
//! The crate pairs small exact simulators with closed-form cost models:
//!
//! - [`circuits`]: seeded random circuits on a planar lattice, the text
//!   format, and patch cuts;
//! - [`statevec`] and [`sfa`]: Schrödinger and Schrödinger-Feynman
//!   simulators used as numerical oracles;
//! - [`xeb`]: linear cross-entropy estimation, sample planning and the
//!   Porter-Thomas test;
//! - [`fidmodel`]: the two-parameter fidelity model, its fit, and error
//!   scaling;
//! - [`costmodel`]: log-domain runtime scalings and hardware profiles;
//! - [`frontier`]: region maps over `(n, m)`, boundary search and export.
//!
//! Qubit `q` is bit `q` of a basis-state index throughout.

pub mod circuits;
pub mod costmodel;
pub mod fidmodel;
pub mod frontier;
pub mod gates;
pub mod sfa;
pub mod statevec;
pub mod xeb;
