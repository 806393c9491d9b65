use thiserror::Error;

use crate::geom::Color;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{color:?} vertex {index} is not covered")]
    Uncovered { color: Color, index: usize },

    #[error("matching is not perfect ({matched} of {total} vertices matched)")]
    NotPerfect { matched: usize, total: usize },

    #[error("invalid augmenting path: {0}")]
    InvalidPath(String),

    #[error("no feasible solution")]
    Infeasible,

    #[error("instance too large for the dense oracle: n = {n} > {bound}")]
    TooLarge { n: usize, bound: usize },

    #[error("site {0} already present")]
    DuplicateSite(usize),

    #[error("site {0} not present")]
    UnknownSite(usize),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
