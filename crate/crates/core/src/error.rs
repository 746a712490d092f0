use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected two node labels, found {found}")]
    Parse { line: usize, found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("graph is disconnected: no path between nodes {0} and {1}")]
    Disconnected(usize, usize),

    #[error("graph diameter does not fit in 16-bit hop counts")]
    DiameterOverflow,

    #[error("invalid attacker set: {0}")]
    InvalidAttackerSet(String),

    #[error("node {0} belongs to the attacker set")]
    NodeInAttackerSet(usize),

    #[error("{0}")]
    Domain(String),

    #[error("enumeration refused: n = {n} exceeds the oracle guard of {guard}")]
    OracleGuard { n: usize, guard: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("time budget exhausted")]
    Timeout,

    #[error("tree descent stalled: {0}")]
    ProofGap(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
