use thiserror::Error;

use crate::fock::ModeLayout;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode layout mismatch: expected {expected}, found {found}")]
    LayoutMismatch {
        expected: ModeLayout,
        found: ModeLayout,
    },

    #[error("occupation vector has {found} entries but the layout has {expected} modes")]
    OccupationLength { expected: usize, found: usize },

    #[error("operation requires {required} spatial modes, layout has {found}")]
    SpatialModes { required: String, found: usize },

    #[error("superposition needs at least one term")]
    EmptySuperposition,

    #[error("state is the zero vector")]
    ZeroState,

    #[error("matrix dimension mismatch: expected {expected}x{expected}, found {rows}x{cols}")]
    Dimension {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not unitary (max |U^dag U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (max |h - h^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("not a permutation of 0..{len}: {detail}")]
    NotPermutation { len: usize, detail: String },

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("both outcome probabilities vanish at kappa = {0}")]
    DegenerateProbability(f64),

    #[error("dense sector dimension {dim} exceeds the cap of {cap}")]
    SectorTooLarge { dim: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
