use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter violates its domain. `name` is the field as it appears in configs.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("turbines {first} and {second} share the same position")]
    DuplicatePosition { first: usize, second: usize },

    #[error("downwind distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("scenario weights sum to {sum}, expected 1 within 1e-9")]
    Unnormalized { sum: f64 },

    #[error("efficiency denominator degenerate: wake-free power is zero for this scenario")]
    DegenerateDenominator,

    #[error("cannot place {turbines} turbines on {positions} positions")]
    TooManyTurbines { turbines: usize, positions: usize },

    #[error(
        "spacing infeasible: lattice spacing {spacing} m is below the rotor diameter {diameter} m"
    )]
    SpacingInfeasible { spacing: f64, diameter: f64 },

    #[error("least-squares design is rank deficient: {0}")]
    RankDeficient(String),

    #[error("no swept edge satisfies a power-drop budget of {budget}")]
    BudgetUnsatisfiable { budget: f64 },

    #[error("enumeration of {count:e} layouts exceeds the cap of {cap}")]
    EnumerationTooLarge { count: f64, cap: u64 },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
