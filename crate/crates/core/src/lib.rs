//! Reversible fixed-point arithmetic circuits and the matrix-element oracle
//! for block-encoding the stiffness/mass operator of 1D elastic structures.
//!
//! The crate is organised bottom-up:
//!
//! * [`circuit`] - gate IR, basis-state simulator, adjoint/control/lowering
//!   transformers, resource accounting, and the textual gate-list format.
//! * [`fixedpoint`] - number formats and codes.
//! * [`classical`] - bit-level reference semantics every circuit is tested
//!   against.
//! * [`adders`], [`mulpoly`], [`newton`], [`logic`], [`geometry`] - the
//!   arithmetic and logic circuit library.
//! * [`series`], [`fem`], [`oracle`], [`estimate`] - the problem model, the
//!   assembled oracle, verification sweeps, and closed-form resource
//!   estimates.

pub mod adders;
pub mod circuit;
pub mod classical;
pub mod estimate;
pub mod fem;
pub mod fixedpoint;
pub mod geometry;
pub mod logic;
pub mod mulpoly;
pub mod newton;
pub mod oracle;
pub mod series;

pub use circuit::{BitString, Circuit, CircuitBuilder, Gate, GateKind, ResourceReport};
pub use fixedpoint::{FixedPointFormat, FixedPointValue};
