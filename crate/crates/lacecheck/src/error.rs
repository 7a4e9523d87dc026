use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Exact enumeration would need more bonds than the configured budget.
    #[error("bond budget exceeded: model has {actual} bonds, budget is {budget}")]
    BondBudgetExceeded { actual: usize, budget: usize },

    /// The wet-set transfer state space 2^sites is over budget.
    #[error("state budget exceeded: model has {sites} sites, budget is {budget}")]
    StateBudgetExceeded { sites: usize, budget: usize },

    /// Witness-path enumeration blew past the per-event path budget.
    #[error("path budget exceeded: more than {budget} witness paths for one event")]
    PathBudgetExceeded { budget: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
