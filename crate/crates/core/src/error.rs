use thiserror::Error;

/// Errors shared by the solver and certification modules.
#[derive(Debug, Clone, Error)]
pub enum GameError {
    /// The two structures do not live on the same state/move space.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    /// Ratio distance requested for a pair with differing supports.
    #[error("not structurally equivalent (ratio distance infinite): {0}")]
    NotStructurallyEquivalent(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("operation unsupported: {0}")]
    Unsupported(String),
    /// "Should not occur" conditions such as a singular linear system after
    /// the graph-based eliminations.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, GameError>;
