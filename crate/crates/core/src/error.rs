use thiserror::Error;

/// Errors raised by the simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// No component with one particle per region survives the projection.
    #[error("post-selection impossible: P_LR = {p_lr:e}")]
    PostSelectionImpossible { p_lr: f64 },

    /// `sin 2β` is too small for the observable to carry phase information.
    #[error("indistinguishability too low: sin(2β) = {sin_2beta:e}")]
    IndistinguishabilityTooLow { sin_2beta: f64 },

    /// The two mixture phases have (numerically) equal cosines.
    #[error("indistinguishable phases: |cos φ1 - cos φ2| = {contrast:e}")]
    IndistinguishablePhases { contrast: f64 },

    #[error("plate displacement {x:e} m outside the valid domain |x| < {limit:e} m")]
    PlateDomain { x: f64, limit: f64 },

    #[error("ambiguous fit: {0}")]
    AmbiguousFit(String),

    #[error("missing tomography setting {0}")]
    MissingSetting(String),

    #[error("parameters not extractable: {0}")]
    Unextractable(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
