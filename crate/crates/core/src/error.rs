use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} has degree 0; combinatorial weight is undefined")]
    IsolatedNode(NodeId),

    #[error("node {0} has no weight")]
    MissingNodeWeight(NodeId),

    #[error("network is empty")]
    EmptyNetwork,

    #[error("non-positive weight {value} on {item}")]
    NonpositiveWeight { item: WeightedItem, value: f64 },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("edge ({0}, {1}) references a node outside the network")]
    DanglingEdge(NodeId, NodeId),

    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),

    #[error("duplicate directed edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),

    #[error("operation requires a directed network")]
    UndirectedNetwork,

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("step too large: {count} edge weight(s) became non-positive")]
    StepTooLarge { count: usize },

    #[error("flow diverged: an edge weight is no longer finite")]
    Diverged,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("input is empty")]
    EmptyInput,

    #[error("bandwidth must be positive, got {0}")]
    NonpositiveBandwidth(f64),

    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    #[error("infeasible masses: {0}")]
    InfeasibleMasses(String),

    #[error("label {0:?} names more than one node")]
    LabelCollision(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("sample target {target} exceeds node count {available}")]
    TargetTooLarge { target: usize, available: usize },

    #[error("line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },

    #[error("line {line}: duplicate directed edge {source_label} -> {target_label}")]
    DuplicateDirectedEdge {
        line: usize,
        source_label: String,
        target_label: String,
    },

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Which weight a [`Error::NonpositiveWeight`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedItem {
    Node(NodeId),
    Edge(EdgeId),
}

impl std::fmt::Display for WeightedItem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightedItem::Node(v) => write!(f, "node {v}"),
            WeightedItem::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
