//! Stators: objects that act as an operator on a system `A` and as a state of
//! an ancilla `B`, written `S = Σ_i M_i ⊗ |i>`.
//!
//! The crate builds stators for normal operators and finite groups, checks
//! Kraus completeness and the eigenoperator relation `Θ_B S = S Θ_A`, dilates
//! stators to unitaries, and uses them to drive a system through an ancilla,
//! including many-body products built from two-body unitaries.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod groups;
pub mod io;
pub mod manybody;
pub mod numerics;
pub mod stator;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexVector, Spectrum, C64};
