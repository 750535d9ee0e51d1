use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e} below tolerance)")]
    NotPsd { eigenvalue: f64 },
    #[error("system is not asymptotically stable (max real part {max_real_part:e})")]
    UnstableSystem { max_real_part: f64 },
    #[error("singular diagonal block in Schur back-substitution")]
    SingularBlock,
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams {
        field: &'static str,
        reason: &'static str,
    },
    #[error("grid with {n} nodes is too coarse (need at least 3)")]
    GridTooCoarse { n: usize },
    #[error("requested order {r} exceeds numerical rank {rank}")]
    RankDeficient { r: usize, rank: usize },
    #[error("truncation at order {r} splits a plateau of equal Hankel singular values")]
    PlateauSplit { r: usize },
    #[error("shift is an eigenvalue of the system matrix")]
    SingularShift,
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("query time {t} outside [{t0}, {tf}]")]
    OutOfRange { t: f64, t0: f64, tf: f64 },
    #[error("time grids do not match")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
