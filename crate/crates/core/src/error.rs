use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KerrError {
    #[error("state vector must have at least one amplitude")]
    EmptyState,

    #[error("Fock cutoff {dim} too small for |alpha| = {alpha_abs}: tail mass {tail:.3e} exceeds {limit:.0e}")]
    CutoffTooSmall { alpha_abs: f64, dim: usize, tail: f64, limit: f64 },

    #[error("truncation M = {m_cut} must be below the Fock cutoff {dim}")]
    TruncationExceedsDim { m_cut: usize, dim: usize },

    #[error("truncation M is required for this operation")]
    MissingTruncation,

    #[error("displacement by |beta| = {beta_abs} leaks past the cutoff: tail mass {tail:.3e} above level {guard}")]
    DisplacementLeak { beta_abs: f64, tail: f64, guard: usize },

    #[error("state dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate phase-space region: {0}")]
    DegenerateRegion(String),

    #[error("Wigner fields are not defined on the same grid")]
    GridMismatch,

    #[error("isoline at level {level} undefined: {reason}")]
    IsolineUndefined { level: f64, reason: String },

    #[error("red sideband has no lower motional level at n = 0")]
    NoLowerLevel,

    #[error("target occupies level {level}, beyond the trap limit m_max = {m_max}")]
    SupportExceedsTrapLimit { level: usize, m_max: usize },

    #[error("cumulative pulse time {total:.4e} s exceeds the vibrational coherence {limit:.4e} s")]
    CoherenceBudgetExceeded { total: f64, limit: f64 },

    #[error("coupling strength vanishes for {kind} pulse at level {level}")]
    VanishingCoupling { kind: &'static str, level: usize },

    #[error("electronic state is not a sigma_x eigenstate (residual {residual:.3e})")]
    NotSigmaXEigenstate { residual: f64 },
}

pub type Result<T> = std::result::Result<T, KerrError>;
