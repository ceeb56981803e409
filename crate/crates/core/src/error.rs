use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate paper id `{id}` on lines {first} and {second}")]
    DuplicateId {
        id: String,
        first: usize,
        second: usize,
    },

    #[error("keyword is empty after normalization")]
    EmptyKeyword,

    #[error("alias map contains a cycle: {}", .0.join(" -> "))]
    AliasCycle(Vec<String>),

    #[error("alias chain starting at `{0}` needs more than two hops to resolve")]
    AliasChainTooLong(String),

    #[error("keyword `{0}` has no entry in the code map")]
    UnmappedKeyword(String),

    #[error("code map entry for `{0}` has no codes")]
    EmptyCodeSet(String),

    #[error("document-keyword matrix has {0} keyword(s); at least 2 are required")]
    DegenerateMatrix(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("non-finite distance between items {0} and {1}")]
    NonFiniteDistance(usize, usize),

    #[error("cluster count {k} outside 1..={n}")]
    ClusterCount { k: usize, n: usize },

    #[error("coder keyword universes differ")]
    UniverseMismatch,

    #[error("need at least {needed} data points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("{stage}: {error}")]
    Stage { stage: Stage, error: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),
}

/// Pipeline stage names used to annotate errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Filter,
    Matrix,
    Correlation,
    Cluster,
    Network,
    Metrics,
    Diagram,
    Trends,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Filter => "filter",
            Stage::Matrix => "matrix",
            Stage::Correlation => "correlation",
            Stage::Cluster => "cluster",
            Stage::Network => "network",
            Stage::Metrics => "metrics",
            Stage::Diagram => "diagram",
            Stage::Trends => "trends",
        };
        f.write_str(s)
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            error: Box::new(e),
        })
    }
}
