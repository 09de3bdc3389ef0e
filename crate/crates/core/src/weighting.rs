//! Node and edge weighting schemes for networks that carry no intrinsic weights.

use crate::error::{Error, Result};
use crate::graph::{Orientation, WeightedNetwork};

/// Standard weights `w(p-cell) = w1 * w2^p`; nodes are 0-cells, edges 1-cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardWeightParams {
    w1: f64,
    w2: f64,
}

impl StandardWeightParams {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if !(w1 > 0.0 && w1.is_finite() && w2 > 0.0 && w2.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "standard weights need w1, w2 > 0 (got {w1}, {w2})"
            )));
        }
        Ok(StandardWeightParams { w1, w2 })
    }

    /// The combinatorial weights, every cell weighs 1.
    pub fn combinatorial() -> Self {
        StandardWeightParams { w1: 1.0, w2: 1.0 }
    }

    pub fn weight(&self, dimension: u32) -> f64 {
        self.w1 * self.w2.powi(dimension as i32)
    }

    pub fn apply(&self, g: &WeightedNetwork) -> WeightedNetwork {
        let node = self.weight(0);
        let edge = self.weight(1);
        g.clone()
            .with_node_weights(vec![node; g.node_count()])
            .and_then(|h| h.with_edge_weights(vec![edge; g.edge_count()]))
            .expect("standard weights are positive")
    }
}

/// Mean neighbour degree of every node, `(1/deg v) * sum_{u~v} deg u`.
///
/// Values are raw (typically above 1); pass the result through
/// [`normalize_weights`] before computing curvature.
pub fn combinatorial_node_weights(g: &WeightedNetwork) -> Result<Vec<f64>> {
    (0..g.node_count())
        .map(|v| {
            let incident = g.incident_edges(v);
            if incident.is_empty() {
                return Err(Error::IsolatedNode(v));
            }
            let total: usize = incident
                .iter()
                .map(|&e| g.degree(g.other_endpoint(e, v)))
                .sum();
            Ok(total as f64 / incident.len() as f64)
        })
        .collect()
}

/// Edge weights derived from endpoint weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedEdgeWeights {
    pub magnitudes: Vec<f64>,
    pub orientation: Vec<Orientation>,
}

/// `gamma(e_ij) = sign(e_ij) * sqrt(omega_i^2 + omega_j^2)`, `sign = +1` iff `i <= j`.
///
/// `node_weights` must cover every node.
pub fn derive_edge_weights(g: &WeightedNetwork, node_weights: &[f64]) -> Result<DerivedEdgeWeights> {
    if node_weights.len() < g.node_count() {
        return Err(Error::MissingNodeWeight(node_weights.len()));
    }
    let (magnitudes, orientation) = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (
                node_weights[u].hypot(node_weights[v]),
                Orientation::from_endpoints(u, v),
            )
        })
        .unzip();
    Ok(DerivedEdgeWeights {
        magnitudes,
        orientation,
    })
}

/// Divides node weights and edge weights each by their own maximum.
pub fn normalize_weights(g: &WeightedNetwork) -> Result<WeightedNetwork> {
    if g.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let nodes = scale_to_unit_max(g.node_weights());
    let edges = scale_to_unit_max(g.edge_weights());
    g.clone()
        .with_node_weights(nodes)
        .and_then(|g| g.with_edge_weights(edges))
}

pub(crate) fn scale_to_unit_max(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter().map(|&w| w / max).collect()
}

/// Combinatorial node weights, derived edge weights, then normalization.
pub fn apply_combinatorial_weights(g: &WeightedNetwork) -> Result<WeightedNetwork> {
    let omega = combinatorial_node_weights(g)?;
    let derived = derive_edge_weights(g, &omega)?;
    let g = g
        .clone()
        .with_node_weights(omega)?
        .with_edge_weights(derived.magnitudes)?
        .with_orientation(derived.orientation)?;
    normalize_weights(&g)
}
