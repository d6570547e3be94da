use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    /// The position linear system is singular at every orientation; the
    /// caller must use the analytic family solver.
    #[error("geometry belongs to the degenerate-manipulator family")]
    DegenerateFamily,

    #[error("geometry is not in the degenerate-manipulator family")]
    NotInFamily,

    /// A degenerate orientation was requested but no real position exists
    /// for the given joint lengths.
    #[error("degenerate orientation is infeasible for these joint lengths (discriminant {0:.3e})")]
    InconsistentDegeneracy(f64),

    #[error("forward kinematics admits a continuum of solutions for these inputs")]
    ContinuumOfSolutions,

    /// Violated numerical invariant. Indicates a bug rather than bad input.
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_invalid_input(&self) -> bool {
        matches!(self, Error::InvalidGeometry(_) | Error::InvalidInput(_))
    }
}
