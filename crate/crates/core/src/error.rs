use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial degree {0} is too low for this operation")]
    DegreeTooLow(isize),
    #[error("root finder did not converge after {0} restarts")]
    NoConvergence(usize),
    #[error("degree {m} does not divide {n}")]
    InvalidDegree { n: usize, m: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group generated by the given permutations is not transitive")]
    NotTransitive,
    #[error("the full cycle (1 2 ... n) is not among the generators")]
    NotFullCycle,
    #[error("{d} is not a divisor of {n}")]
    InvalidDivisor { n: usize, d: usize },
    #[error("basic sets are not closed under multiplication")]
    NotClosed,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("branch tracking failed: {0}")]
    TrackingFailure(String),
    #[error("monodromy relation g_1 ... g_k g_inf = 1 violated")]
    RelationViolation,
    #[error("cactus is not a tree: {0}")]
    TreeViolation(String),
    #[error("endpoint branches do not form a cycle of the local generator: {0}")]
    VertexMismatch(String),
    #[error("degenerate path between endpoint vertices")]
    DegeneratePath,
    #[error("leading coefficient vanishes")]
    NotNormalizable,
    #[error("truncation order {got} too short, need at least {need}")]
    TruncationTooShort { need: usize, got: usize },
    #[error("polynomial recovery failed, residual {0:e}")]
    RecoveryFailure(f64),
    #[error("invariant subspace dimension {got} differs from sum of pieces {expected}")]
    DecompositionMismatch { expected: usize, got: usize },
    #[error("no right factor of degree {degree} although the monodromy predicts one")]
    FactorMissing { degree: usize },
    #[error("right factor is not constant on residue classes mod {d}")]
    BlockMismatch { d: usize },
    #[error("not a solution of the moment problem: {0}")]
    NotASolution(String),
    #[error("series residual {0:e} left after exhausting all imprimitivity systems")]
    ResidualNonzero(f64),
    #[error("malformed input: {0}")]
    MalformedInput(String),
}
