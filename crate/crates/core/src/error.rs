use alloc::string::String;

use crate::network::EdgeId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configured size cap was exceeded.
    #[error("resource limit exceeded for {what}: {requested} > {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// The Dirichlet problem is singular because `vertex` lies in a
    /// component that contains no boundary vertex.
    #[error("no unique solution: vertex {vertex} lies in a component without boundary vertices")]
    NoUniqueSolution { vertex: usize },

    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error("network is disconnected: vertex {vertex} is unreachable from vertex {from}")]
    Disconnected { vertex: usize, from: usize },

    #[error("edge {0:?} is a bridge; conditioning on its absence is undefined")]
    Bridge(EdgeId),

    /// An internal cross-check failed (e.g. enumeration vs. determinant).
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
