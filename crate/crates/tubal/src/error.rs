use thiserror::Error;

/// Errors produced by the numeric core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("row {row} is neither real nor conjugate to exactly one other row")]
    InvalidRowStructure { row: usize },
    #[error("imaginary residue {residue:.3e} exceeds tolerance {threshold:.3e}")]
    ResidualImaginary { residue: f64, threshold: f64 },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("repeated root: a modular polynomial product needs distinct roots")]
    DuplicateRoots,
    #[error("realness {m} does not match dimension {n} parity")]
    ParityMismatch { n: usize, m: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operands were transformed under different specs")]
    SpecMismatch,
    #[error("SVD did not converge within {0} sweeps")]
    SvdNoConvergence(usize),
    #[error("eigendecomposition did not converge")]
    EigNoConvergence,
    #[error("rank {k} out of range (at most {max})")]
    RankOutOfRange { k: usize, max: usize },
    #[error("closed-form tail error holds only for scaled-unitary transforms")]
    NotScaledUnitary,
    #[error("no well-conditioned eigenbasis found after {0} draws")]
    NotDiagonalizable(usize),
    #[error("recovered transform does not reproduce the operation (residual {0:.3e})")]
    ResidualTooLarge(f64),
    #[error("op table: {0}")]
    BadOpTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
