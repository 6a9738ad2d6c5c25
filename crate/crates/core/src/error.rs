use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // core model
    #[error("effort must be nonnegative and finite, got {0}")]
    NegativeEffort(f64),
    #[error("degenerate profile: total effective effort is zero, payoff is undefined")]
    DegenerateProfile,
    #[error("degenerate scenario: total power across all coalitions is zero")]
    DegenerateScenario,
    #[error("no candidate coalitions to choose from")]
    EmptyCandidates,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("unknown coalition `{0}`")]
    UnknownCoalition(String),
    #[error("unknown sub-coalition `{0}`")]
    UnknownBranch(String),
    #[error("player `{player}` is not a member of `{group}`")]
    NotAMember { player: String, group: String },
    #[error("effort profile has no entry for player `{0}`")]
    MissingEffort(String),

    // equilibrium
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("operation requires quadratic costs, player `{0}` has a different cost kind")]
    UnsupportedCost(String),
    #[error("prize must be positive and finite, got {0}")]
    InvalidPrize(f64),
    #[error("effort grid needs at least 2 points, got {0}")]
    GridTooCoarse(usize),
    #[error("strategies are not defined on a common grid")]
    GridMismatch,
    #[error("state is not on the probability simplex (sum {sum}, min {min})")]
    NotOnSimplex { sum: f64, min: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    // cooperative games
    #[error("exact enumeration supports at most {max} players, got {found}")]
    TooManyPlayers { found: usize, max: usize },
    #[error("characteristic function has no value for subset {0:#b}")]
    MissingSubsetValue(u32),
    #[error("variance-penalized endurance needs effectiveness weights")]
    MissingEffectiveness,

    // case study
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("return series has zero volatility, Sharpe ratio undefined")]
    ZeroVolatility,
    #[error("asset `{0}` is not assigned to any coalition")]
    UnassignedAsset(String),
    #[error("asset `{0}` appears more than once")]
    DuplicateAsset(String),
    #[error("no asset has price data in year {0}")]
    EmptyYear(i32),
    #[error("counterfactual selector `{0}` does not match any coalition or player")]
    UnknownSelector(String),
    #[error("{path}: {message}")]
    PriceData { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
