use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library. Shape mismatches between values that are
/// required to share a dimension are treated as programming errors and panic
/// instead (see the per-function docs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A product layer grew past its configured cap during expansion.
    LayerCapExceeded { cap: usize, attempted: usize },
    /// The DFA associated to a matrix set would have more letters than allowed.
    LetterCapExceeded { cap: u128, count: u128 },
    /// A state-space construction (subset BFS, subset multigraph) was asked
    /// for more states than the configured cap allows.
    StateCapExceeded { cap: usize, n: usize },
    /// Breadth-first semigroup exploration exceeded its closure cap without
    /// reaching the all-ones matrix or closing.
    ClosureCapExceeded { cap: usize },
    /// The operation requires a synchronizing DFA.
    NotSynchronizing,
    /// The operation requires a primitive matrix set.
    NotPrimitive,
    /// The requested built-in example set does not exist.
    UnknownExample(String),
    /// A matrix, matrix set or LP input violates a structural precondition.
    Invalid(String),
    /// A line fit is degenerate (zero slope), so no estimate exists.
    DegenerateFit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LayerCapExceeded { cap, attempted } => write!(
                f,
                "product layer cap exceeded: cap {cap}, expansion needs {attempted}"
            ),
            Error::LetterCapExceeded { cap, count } => {
                write!(f, "letter cap exceeded: cap {cap}, set has {count} letters")
            }
            Error::StateCapExceeded { cap, n } => {
                write!(f, "state cap exceeded: cap {cap}, requested n = {n}")
            }
            Error::ClosureCapExceeded { cap } => {
                write!(f, "semigroup closure cap of {cap} matrices exceeded")
            }
            Error::NotSynchronizing => write!(f, "the DFA is not synchronizing"),
            Error::NotPrimitive => write!(f, "the matrix set is not primitive"),
            Error::UnknownExample(id) => write!(f, "unknown example set id `{id}`"),
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::DegenerateFit(msg) => write!(f, "degenerate fit: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
