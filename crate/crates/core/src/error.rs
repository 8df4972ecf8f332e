use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("partition has no vertices")]
    EmptyPartition,
    #[error("cover has no communities")]
    EmptyCover,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown vertex `{label}`")]
    UnknownVertex { line: usize, label: String },
    #[error("vertex `{label}` has no community")]
    IncompleteCover { label: String },
    #[error("line {line}: vertex `{label}` has more than one community")]
    NotDisjoint { line: usize, label: String },
    #[error("the {0} cover is overlapping; nmi needs disjoint communities on both sides")]
    OverlappingCover(&'static str),
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(usize),
    #[error("vertex `{0}` has no neighbors")]
    IsolatedVertex(String),
    #[error("community {target} is not adjacent to vertex `{vertex}` or is its own community")]
    InvalidTarget { vertex: String, target: usize },
    #[error("inputs are defined over different vertex sets: {0}")]
    DomainMismatch(String),
    #[error("study is degenerate: {0}")]
    DegenerateStudy(String),
    #[error("ground truth has no vertex with two or more memberships")]
    NoOverlapVertex,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("failed to read input: {0}")]
    Read(#[source] std::io::Error),
    #[error("failed to write output: {0}")]
    Write(#[source] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
