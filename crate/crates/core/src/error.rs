//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Error`]. The CLI maps error
//! kinds to process exit codes via [`Error::exit_code`].

use crate::engine::EliminationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A set expression violates a structural rule (bad interval bounds,
    /// unknown sequence id, index before the sequence domain, ...).
    #[error("malformed set: {0}")]
    MalformedSet(String),

    /// A set operation whose exact result is not expressible with the
    /// available primitives, or whose decision procedure does not cover the
    /// given pair of operands. Never silently approximated.
    #[error("unsupported set combination: {0}")]
    UnsupportedCombination(String),

    /// A sequence definition violates a registry rule (non-monotone, zero
    /// denominator on the domain, declared limit mismatch, duplicate id).
    #[error("invalid sequence `{id}`: {detail}")]
    InvalidSequence { id: String, detail: String },

    /// A game file failed validation. `location` is a JSON-path style hint.
    #[error("game format error at {location}: {detail}")]
    GameFormat { location: String, detail: String },

    /// Strict dominance is undefined against an empty opponent set.
    #[error("dominance relation undefined: opponent set is empty for player {player}")]
    UndefinedRelation { player: String },

    /// A scripted or requested elimination step removes a strategy that is
    /// not legally removable in the given mode.
    #[error("illegal {mode} step: player {player}, strategy {strategy}: {detail}")]
    IllegalStep {
        player: String,
        strategy: String,
        mode: String,
        detail: String,
    },

    /// The run budget (successor steps or limit stages) was exhausted before
    /// reaching a maximal reduction. Carries the partial trace.
    #[error("budget exhausted: {detail}")]
    BudgetExhausted {
        detail: String,
        partial: Box<EliminationTrace>,
    },

    /// An enumeration cap (strategy count, node count, sequence count) was hit.
    #[error("enumeration cap exceeded: {0}")]
    EnumerationTooLarge(String),

    /// A symbolic game oracle was asked a query outside its certified shapes.
    #[error("unsupported query for `{entry}`: {detail}")]
    UnsupportedQuery { entry: String, detail: String },

    /// Invalid run/CLI configuration (bad policy for the game, missing seed,
    /// conflicting inputs, unparsable caps override, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error.
    ///
    /// 2: illegal input or configuration. 3: budget/caps exhausted.
    /// 4: a symbolic oracle cannot answer the query.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExhausted { .. } | Error::EnumerationTooLarge(_) => 3,
            Error::UnsupportedQuery { .. } | Error::UnsupportedCombination(_) => 4,
            _ => 2,
        }
    }
}
