use thiserror::Error;

/// Errors raised by mechanisms, checks and audits.
///
/// Variants fall into two groups: malformed input (bad shapes, out-of-range
/// indices, non-finite values) and contract violations (a mechanism's
/// precondition does not hold for the supplied data). The CLI maps the first
/// group to exit code 2 and the second to exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("admissibility violated: agents {0} and {1} share an x-coordinate")]
    Inadmissible(usize, usize),

    #[error("sets are not separable by a vertical line")]
    NotSeparable,

    #[error("partition is not publicly separable (x-vectors of the sets are not well separable)")]
    NotPubliclySeparable,

    #[error("{sets} sets cannot be well separable in R^{dim} (at most {} allowed)", dim + 1)]
    TooManySets { sets: usize, dim: usize },

    #[error("hyperplanes are equal; no comparison is defined")]
    EqualHyperplanes,

    #[error("hyperplane comparison scan found no uniformly ordered set")]
    ComparisonFailed,

    #[error("singular linear system through transversal {0:?} (public separability violated)")]
    SingularTransversal(Vec<usize>),

    #[error("no transversal hyperplane satisfies the rank conditions")]
    NoSolution,

    #[error("{0} distinct hyperplanes satisfy the rank conditions")]
    UniquenessViolation(usize),

    #[error("linear program is unbounded (check regularizer drift)")]
    Unbounded,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("simplex iteration limit reached")]
    IterationLimit,

    #[error("need at least {needed} other agents, found {found}")]
    NotEnoughAgents { needed: usize, found: usize },

    #[error("mechanism `{0}` does not support this operation: {1}")]
    Unsupported(String, String),
}

impl Error {
    /// True for precondition failures of a mechanism, as opposed to malformed input.
    pub fn is_contract_violation(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch { .. } | Error::InvalidInput(_) | Error::IndexOutOfRange { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
