use thiserror::Error;

use crate::grid::BusId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid case: {0}")]
    Validation(String),

    #[error("network is split into {} islands: {}", .0.len(), format_islands(.0))]
    Islands(Vec<Vec<BusId>>),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("eliminated buses {0:?} form an island with no retained neighbour")]
    FloatingIsland(Vec<BusId>),

    #[error("{0}")]
    Domain(String),

    #[error("evidence is in total conflict")]
    Conflict,

    #[error("configuration: {0}")]
    Config(String),

    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn format_islands(islands: &[Vec<BusId>]) -> String {
    islands
        .iter()
        .map(|island| {
            let ids: Vec<String> = island.iter().map(|id| id.to_string()).collect();
            format!("{{{}}}", ids.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
