//! Forman-Ricci curvature of edges and nodes.
//!
//! For an edge `e = (v1, v2)` with edge weight `w_e` and node weights `w_1`,
//! `w_2` the curvature is
//!
//! ```text
//! Ric(e) = w_e * ( w_1/w_e + w_2/w_e
//!                  - sum_{e1 ~ v1, e1 != e} w_1 / sqrt(w_e * w_e1)
//!                  - sum_{e2 ~ v2, e2 != e} w_2 / sqrt(w_e * w_e2) )
//! ```
//!
//! Each endpoint contributes an independent sum over its other incident edges.
//! With unit weights this collapses to `4 - deg(v1) - deg(v2)`.
//!
//! Directed networks split the two endpoint contributions: the "head" term
//! sits at the source node and the "tail" term at the target node, and each
//! endpoint only sees the neighbour edges selected by a [`DirectedConvention`].
//!
//! Whole-field evaluation factors the neighbour sums through per-node sums of
//! `1/sqrt(w_e)`, so a field costs `O(|E|)`. The per-edge functions enumerate
//! neighbours directly and serve as the reference.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, WeightedNetwork};
use crate::numeric::{pairwise_sum, pairwise_sum_by};

/// Which neighbour edges enter the head (source) and tail (target) terms of a
/// directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectedConvention {
    /// Incoming edges are measured at the head, outgoing edges at the tail.
    #[default]
    IncomingAtHeadOutgoingAtTail,
    /// The mirror image: outgoing edges at the head, incoming at the tail.
    OutgoingAtHeadIncomingAtTail,
    /// Every incident edge at both ends; the total then equals the
    /// undirected curvature.
    AllIncident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Serial,
    /// Rayon data parallelism over nodes and edges. Output is bit-identical
    /// to [`Execution::Serial`].
    Parallel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CurvatureOptions {
    pub convention: DirectedConvention,
    pub execution: Execution,
}

/// Head and tail contributions of a directed edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedCurvature {
    pub head: f64,
    pub tail: f64,
}

impl DirectedCurvature {
    pub fn total(&self) -> f64 {
        self.head + self.tail
    }
}

/// In/out curvature of a node of a directed network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFlowCurvature {
    pub incoming: f64,
    pub outgoing: f64,
    /// `incoming - outgoing`
    pub net: f64,
}

/// Curvature of every edge and node of a network.
///
/// For directed networks `edge` holds `head + tail` and `directed_parts` the
/// split.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub edge: Vec<f64>,
    pub node: Option<Vec<f64>>,
    pub directed_parts: Option<Vec<DirectedCurvature>>,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.edge.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge.is_empty()
    }

    /// Fills `node` with the sum of incident edge curvatures.
    pub fn with_node_curvature(mut self, g: &WeightedNetwork) -> Self {
        let node = (0..g.node_count())
            .map(|v| pairwise_sum_by(g.incident_edges(v).iter(), |&e| self.edge[e]))
            .collect();
        self.node = Some(node);
        self
    }

    /// Weighted mean `sum Ric(e) w_e / sum w_e`.
    pub fn weighted_mean(&self, edge_weights: &[f64]) -> f64 {
        let num: Vec<f64> = self
            .edge
            .iter()
            .zip(edge_weights)
            .map(|(r, w)| r * w)
            .collect();
        pairwise_sum(&num) / pairwise_sum(edge_weights)
    }
}

/// Undirected Forman-Ricci curvature of one edge, by direct enumeration.
///
/// Direction is ignored: every incident edge of each endpoint counts.
pub fn forman_edge_curvature(g: &WeightedNetwork, e: EdgeId) -> Result<f64> {
    g.check_edge(e)?;
    let (v1, v2) = g.endpoints(e);
    let we = g.edge_weight(e);
    let (w1, w2) = (g.node_weight(v1), g.node_weight(v2));
    let others = |v: NodeId, wv: f64| {
        pairwise_sum_by(
            g.incident_edges(v).iter().filter(|&&f| f != e),
            |&f| wv / (we * g.edge_weight(f)).sqrt(),
        )
    };
    Ok(we * (w1 / we + w2 / we - (others(v1, w1) + others(v2, w2))))
}

/// Curvature of an edge as stored in [`curvature_field`]: undirected
/// curvature, or `head + tail` under the default convention when directed.
pub fn edge_curvature(g: &WeightedNetwork, e: EdgeId) -> Result<f64> {
    if g.is_directed() {
        directed_curvature(g, e, DirectedConvention::default()).map(|d| d.total())
    } else {
        forman_edge_curvature(g, e)
    }
}

/// Node curvature, the sum of [`edge_curvature`] over incident edges.
pub fn forman_node_curvature(g: &WeightedNetwork, v: NodeId) -> Result<f64> {
    g.check_node(v)?;
    let values = g
        .incident_edges(v)
        .iter()
        .map(|&e| edge_curvature(g, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&values))
}

fn head_set(g: &WeightedNetwork, v: NodeId, conv: DirectedConvention) -> &[EdgeId] {
    match conv {
        DirectedConvention::IncomingAtHeadOutgoingAtTail => g.incoming_edges(v),
        DirectedConvention::OutgoingAtHeadIncomingAtTail => g.outgoing_edges(v),
        DirectedConvention::AllIncident => g.incident_edges(v),
    }
}

fn tail_set(g: &WeightedNetwork, v: NodeId, conv: DirectedConvention) -> &[EdgeId] {
    match conv {
        DirectedConvention::IncomingAtHeadOutgoingAtTail => g.outgoing_edges(v),
        DirectedConvention::OutgoingAtHeadIncomingAtTail => g.incoming_edges(v),
        DirectedConvention::AllIncident => g.incident_edges(v),
    }
}

/// Head and tail terms of a directed edge, by direct enumeration.
pub fn directed_curvature(
    g: &WeightedNetwork,
    e: EdgeId,
    conv: DirectedConvention,
) -> Result<DirectedCurvature> {
    if !g.is_directed() {
        return Err(Error::UndirectedNetwork);
    }
    g.check_edge(e)?;
    let (source, target) = g.endpoints(e);
    let we = g.edge_weight(e);
    let term = |v: NodeId, set: &[EdgeId]| {
        let wv = g.node_weight(v);
        let sum = pairwise_sum_by(set.iter().filter(|&&f| f != e), |&f| {
            wv / (we * g.edge_weight(f)).sqrt()
        });
        we * (wv / we - sum)
    };
    Ok(DirectedCurvature {
        head: term(source, head_set(g, source, conv)),
        tail: term(target, tail_set(g, target, conv)),
    })
}

/// In, out and net curvature of a node of a directed network.
///
/// `incoming` sums the tail terms of edges ending at `v`, `outgoing` the head
/// terms of edges leaving `v`; both are the contributions measured at `v`.
pub fn node_in_out_curvature(
    g: &WeightedNetwork,
    v: NodeId,
    conv: DirectedConvention,
) -> Result<NodeFlowCurvature> {
    if !g.is_directed() {
        return Err(Error::UndirectedNetwork);
    }
    g.check_node(v)?;
    let tails = g
        .incoming_edges(v)
        .iter()
        .map(|&e| directed_curvature(g, e, conv).map(|d| d.tail))
        .collect::<Result<Vec<_>>>()?;
    let heads = g
        .outgoing_edges(v)
        .iter()
        .map(|&e| directed_curvature(g, e, conv).map(|d| d.head))
        .collect::<Result<Vec<_>>>()?;
    let incoming = pairwise_sum(&tails);
    let outgoing = pairwise_sum(&heads);
    Ok(NodeFlowCurvature {
        incoming,
        outgoing,
        net: incoming - outgoing,
    })
}

/// In/out curvature of every node, read from a field computed with the same
/// convention.
pub fn node_flow_curvatures(g: &WeightedNetwork, field: &CurvatureField) -> Result<Vec<NodeFlowCurvature>> {
    let parts = field.directed_parts.as_ref().ok_or(Error::UndirectedNetwork)?;
    Ok((0..g.node_count())
        .map(|v| {
            let incoming = pairwise_sum_by(g.incoming_edges(v).iter(), |&e| parts[e].tail);
            let outgoing = pairwise_sum_by(g.outgoing_edges(v).iter(), |&e| parts[e].head);
            NodeFlowCurvature {
                incoming,
                outgoing,
                net: incoming - outgoing,
            }
        })
        .collect())
}

/// Curvature of every edge with the default options, node sums included.
pub fn curvature_field(g: &WeightedNetwork) -> CurvatureField {
    curvature_field_with(g, &CurvatureOptions::default())
}

pub fn curvature_field_with(g: &WeightedNetwork, opts: &CurvatureOptions) -> CurvatureField {
    let field = if g.is_directed() {
        directed_field(g, opts)
    } else {
        CurvatureField {
            edge: undirected_edges(g, opts.execution),
            node: None,
            directed_parts: None,
        }
    };
    field.with_node_curvature(g)
}

fn map_indices<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Serial => (0..n).map(f).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

fn inverse_sqrt_weights(g: &WeightedNetwork, exec: Execution) -> Vec<f64> {
    let w = g.edge_weights();
    map_indices(w.len(), exec, |e| 1.0 / w[e].sqrt())
}

fn node_sums<'a, S>(g: &'a WeightedNetwork, inv_sqrt: &[f64], exec: Execution, set: S) -> Vec<f64>
where
    S: Fn(NodeId) -> &'a [EdgeId] + Sync + Send,
{
    map_indices(g.node_count(), exec, |v| {
        pairwise_sum_by(set(v).iter(), |&e| inv_sqrt[e])
    })
}

fn undirected_edges(g: &WeightedNetwork, exec: Execution) -> Vec<f64> {
    let inv_sqrt = inverse_sqrt_weights(g, exec);
    let sums = node_sums(g, &inv_sqrt, exec, |v| g.incident_edges(v));
    map_indices(g.edge_count(), exec, |e| {
        let (v1, v2) = g.endpoints(e);
        let (w1, w2) = (g.node_weight(v1), g.node_weight(v2));
        let own = inv_sqrt[e];
        let neighbours = w1 * (sums[v1] - own) + w2 * (sums[v2] - own);
        w1 + w2 - g.edge_weight(e).sqrt() * neighbours
    })
}

fn directed_field(g: &WeightedNetwork, opts: &CurvatureOptions) -> CurvatureField {
    let exec = opts.execution;
    let conv = opts.convention;
    let inv_sqrt = inverse_sqrt_weights(g, exec);
    let heads = node_sums(g, &inv_sqrt, exec, |v| head_set(g, v, conv));
    let tails = node_sums(g, &inv_sqrt, exec, |v| tail_set(g, v, conv));
    // Whether the edge itself sits in the head/tail neighbour set.
    let (own_at_head, own_at_tail) = match conv {
        DirectedConvention::IncomingAtHeadOutgoingAtTail => (0.0, 0.0),
        DirectedConvention::OutgoingAtHeadIncomingAtTail | DirectedConvention::AllIncident => {
            (1.0, 1.0)
        }
    };
    let parts: Vec<DirectedCurvature> = map_indices(g.edge_count(), exec, |e| {
        let (source, target) = g.endpoints(e);
        let root = g.edge_weight(e).sqrt();
        let own = inv_sqrt[e];
        let (ws, wt) = (g.node_weight(source), g.node_weight(target));
        DirectedCurvature {
            head: ws - root * ws * (heads[source] - own_at_head * own),
            tail: wt - root * wt * (tails[target] - own_at_tail * own),
        }
    });
    CurvatureField {
        edge: parts.iter().map(DirectedCurvature::total).collect(),
        node: None,
        directed_parts: Some(parts),
    }
}

/// Node-by-node matrix of edge curvatures; `None` where no edge exists.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureMap {
    n: usize,
    cells: Vec<Option<f64>>,
}

impl CurvatureMap {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> Option<f64> {
        self.cells[i * self.n + j]
    }

    pub fn row(&self, i: NodeId) -> &[Option<f64>] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }

    pub fn filled(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn transpose(&self) -> CurvatureMap {
        let n = self.n;
        let mut cells = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                cells[j * n + i] = self.cells[i * n + j];
            }
        }
        CurvatureMap { n, cells }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// `M[i][j]` is the curvature of edge `i -> j`. Undirected edges fill both
/// cells, so undirected maps are symmetric.
pub fn curvature_map(g: &WeightedNetwork, field: &CurvatureField) -> Result<CurvatureMap> {
    if field.edge.len() != g.edge_count() {
        return Err(Error::LengthMismatch {
            expected: g.edge_count(),
            actual: field.edge.len(),
        });
    }
    let n = g.node_count();
    let mut cells = vec![None; n * n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        cells[u * n + v] = Some(field.edge[e]);
        if !g.is_directed() {
            cells[v * n + u] = Some(field.edge[e]);
        }
    }
    Ok(CurvatureMap { n, cells })
}
