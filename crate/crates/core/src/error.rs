use thiserror::Error;

/// Errors produced by the tomography routines.
#[derive(Debug, Error)]
pub enum TomoError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("ragged matrix: row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("vector length {len} is not a perfect square")]
    NotPerfectSquare { len: usize },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("expected {expected} projectors for dimension {dim}, got {got} ({hint})")]
    WrongProjectorCount {
        dim: usize,
        expected: usize,
        got: usize,
        hint: &'static str,
    },

    #[error("projector set is rank deficient: numerical rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("operator {index} is not unitary (residual {residual:.3e})")]
    NotUnitary { index: usize, residual: f64 },

    #[error("operator is not of the expected 2x2 unitary form (residual {residual:.3e})")]
    BadUnitaryForm { residual: f64 },

    #[error("length mismatch: expected {expected} values, got {got}{detail}")]
    LengthMismatch {
        expected: usize,
        got: usize,
        detail: String,
    },

    #[error("{what} out of range: {value} (expected {expected})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid angular momentum arguments: {0}")]
    BadAngularMomentum(String),

    #[error("quadrature interval is degenerate: [{a}, {b}]")]
    DegenerateInterval { a: f64, b: f64 },

    #[error("dimension {dim} exceeds the dense-solve cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("chirp phase under-resolved: need at least {needed} grid points, have {have}")]
    ChirpUnderResolved { needed: usize, have: usize },

    #[error("nu = 0 is outside the eigenfunction family; position-basis limit not supported")]
    NuZero,

    #[error("nu nodes misaligned with the grid difference lattice (offset {offset:.3e})")]
    NuMisaligned { offset: f64 },

    #[error("kernel prefactor overflows at nmax {nmax}: s = {s} outside safe range {safe}")]
    PrefactorOverflow { nmax: usize, s: f64, safe: String },

    #[error("branch ambiguity: sin(tau) = {sin_tau:.3e} too close to zero at s = {s}")]
    BranchAmbiguity { s: f64, sin_tau: f64 },

    #[error("(mu, nu) = ({mu}, {nu}) not reachable by the squeeze family: {why}")]
    SqueezeUnreachable { mu: f64, nu: f64, why: String },

    #[error("missing tomogram values at nodes {missing:?}")]
    MissingNodes { missing: Vec<usize> },
}

pub type Result<T> = std::result::Result<T, TomoError>;
