use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("invalid community structure: {0}")]
    Community(String),
    #[error("linear threshold model requires incoming weights summing to at most 1, node {node} has {sum}")]
    Model { node: u32, sum: f64 },
    #[error("instance too large for exhaustive evaluation: {0}")]
    Size(String),
    #[error("invalid strategy: {0}")]
    Strategy(String),
}
