//! Bosonic Fock-space simulation of generalized Hong-Ou-Mandel interference.
//!
//! The crate models photons in `n` spatial modes carrying a finite internal
//! degree of freedom (`d` orthonormal internal modes), passive linear optics
//! acting on them, and the permutation symmetries that control what
//! photon-number-resolving detection sees after a beam splitter or a DFT
//! interferometer. On top of that sit Fisher-information tools for the
//! two-outcome estimation protocol built from those interferometers.
//!
//! Module map:
//! - [`fock`]: occupation-number basis, sparse pure and mixed states
//! - [`linops`]: mode unitaries and their Fock-space action
//! - [`symmetry`]: exchange / cyclic symmetry measures and residue projectors
//! - [`detection`]: output photon-number statistics
//! - [`metrology`]: evolution, Fisher and quantum Fisher information
//! - [`oracle`]: dense brute-force reference implementations
//! - [`random`]: seeded random states, unitaries and generators
//! - [`verify`]: the oracle-equivalence suite

pub mod detection;
pub mod error;
pub mod fock;
pub mod linops;
pub mod metrology;
pub mod numeric;
pub mod oracle;
pub mod permutation;
pub mod random;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{FockState, MixedState, ModeIndex, ModeLayout, OccupationVector, Sector};
pub use linops::{CMatrix, ModeUnitary, Structure};
pub use num_complex::Complex64;
pub use permutation::Permutation;
