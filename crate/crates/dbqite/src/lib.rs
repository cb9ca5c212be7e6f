//! Ground-state preparation by double-bracket quantum imaginary-time
//! evolution (DB-QITE), with the exact imaginary-time flow as reference,
//! step-by-step cooling and fidelity guarantees as checkable reports, a
//! circuit cost model, and a quantum-phase-estimation baseline.
//!
//! The crate is organized around a handful of value types:
//!
//! - [`StateVector`] / [`PauliString`] — matrix-free statevector kernels.
//! - [`PauliSum`] — Hamiltonians with symbolic identity offsets, spectral
//!   analysis and exact or Trotterized real-time evolution.
//! - [`ite`] — exact imaginary-time evolution and its diagnostics.
//! - [`flow`] — the DBI and DB-QITE recursions, schedules, and the
//!   theorem checkers.
//! - [`costing`] — gate-count and depth models (no statevector work).
//! - [`qpe`] — the phase-estimation comparator.
//!
//! The companion guide under `book/` walks through the same modules with
//! runnable examples; its code blocks compile as doc-tests of this crate.

pub mod costing;
pub mod dense;
pub mod ensemble;
pub mod error;
pub mod flow;
pub mod hamiltonian;
mod lanczos;
pub mod ite;
pub mod qpe;
pub mod state;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use hamiltonian::{EvolutionMethod, PauliSum, PauliTerm, SpectralMode, SpectralSummary};
pub use state::{PauliAxis, PauliString, StateVector};

/// Book chapters compiled as doc-tests (`cargo test --doc`), so the guide
/// can never drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/statevectors.md")]
    mod statevectors {}
    #[doc = include_str!("../../../book/src/hamiltonians.md")]
    mod hamiltonians {}
    #[doc = include_str!("../../../book/src/imaginary-time.md")]
    mod imaginary_time {}
    #[doc = include_str!("../../../book/src/flows.md")]
    mod flows {}
    #[doc = include_str!("../../../book/src/costing.md")]
    mod costing {}
    #[doc = include_str!("../../../book/src/qpe.md")]
    mod qpe {}
}
