//! Forman-Ricci curvature of weighted networks: edge and node curvature,
//! curvature-driven flows, curvature-distribution distances, change
//! detection between snapshots, random graph models and edge-list I/O.

pub mod curvature;
pub mod distance;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod io;
pub mod laplacian;
pub mod numeric;
pub mod weighting;

pub use curvature::{
    curvature_field, curvature_field_with, curvature_map, directed_curvature, edge_curvature,
    forman_edge_curvature, forman_node_curvature, node_flow_curvatures, node_in_out_curvature,
    CurvatureField, CurvatureMap, CurvatureOptions, DirectedConvention, DirectedCurvature,
    Execution, NodeFlowCurvature,
};
pub use distance::{
    bin_distribution, graph_distance, ground_distance, solve_transport, BinGrid,
    CurvatureDistribution, DistanceParams, Kernel,
};
pub use error::{Error, Result};
pub use flow::{
    denoise, denoise_with, flow_step, laplacian_flow_step, ricci_flow_step, run_flow,
    DenoiseConfig, FlowConfig, FlowTrace, FlowVariant,
};
pub use graph::{EdgeId, NetworkBuilder, NodeId, Orientation, WeightedNetwork};
pub use laplacian::{bochner_laplacian, EdgeOperator};
pub use weighting::{
    apply_combinatorial_weights, combinatorial_node_weights, derive_edge_weights,
    normalize_weights, StandardWeightParams,
};
pub use dynamics::{align_edges, detect_changes, ChangeParams, ChangeReport, SnapshotPair};
pub use generators::{generate, sample_subgraph, GeneratorSpec, Model};
pub use io::{parse_edge_list, read_edge_list, write_edge_list, EdgeListFormat};
