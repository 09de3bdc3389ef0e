//! Weighted network model.
//!
//! A [`WeightedNetwork`] is immutable once built. Node ids are dense indices
//! assigned in order of first appearance, edge ids are dense indices in
//! insertion order. Weight-changing operations return a new network.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use log::warn;

use crate::error::{Error, Result, WeightedItem};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Sign attached to an edge weight.
///
/// Curvature and flow formulas only ever see weight magnitudes; the sign is
/// kept for relative orientations in the Bochner Laplacian of directed
/// networks and for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    /// `+1` when `u <= v`, `-1` otherwise.
    pub fn from_endpoints(u: NodeId, v: NodeId) -> Self {
        if u <= v {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    pub fn from_sign(x: f64) -> Self {
        if x.is_sign_negative() {
            Orientation::Negative
        } else {
            Orientation::Positive
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Node-to-edge incidence in CSR layout.
#[derive(Debug, Clone, Default)]
struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<EdgeId>,
}

impl Incidence {
    fn build(n: usize, pairs: impl Iterator<Item = (NodeId, EdgeId)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (v, _) in pairs.clone() {
            offsets[v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut edges = vec![0; offsets[n]];
        for (v, e) in pairs {
            edges[cursor[v]] = e;
            cursor[v] += 1;
        }
        Incidence { offsets, edges }
    }

    fn of(&self, v: NodeId) -> &[EdgeId] {
        &self.edges[self.offsets[v]..self.offsets[v + 1]]
    }
}

#[derive(Debug, Clone)]
pub struct WeightedNetwork {
    directed: bool,
    labels: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
    node_weights: Vec<f64>,
    edge_weights: Vec<f64>,
    orientation: Vec<Orientation>,
    incident: Incidence,
    outgoing: Incidence,
    incoming: Incidence,
}

impl WeightedNetwork {
    /// Builds a network with unit node and edge weights.
    ///
    /// Self-loops and dangling endpoints are rejected. A repeated directed
    /// edge is an error; a repeated undirected edge collapses onto the first
    /// occurrence with a warning.
    pub fn new(labels: Vec<String>, edges: Vec<(NodeId, NodeId)>, directed: bool) -> Result<Self> {
        let n = labels.len();
        let mut kept = Vec::with_capacity(edges.len());
        let mut seen = HashMap::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::DanglingEdge(u, v));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            match seen.entry(edge_key(u, v, directed)) {
                Entry::Occupied(_) if directed => return Err(Error::DuplicateEdge(u, v)),
                Entry::Occupied(_) => warn!("collapsing duplicate undirected edge ({u}, {v})"),
                Entry::Vacant(slot) => {
                    slot.insert(kept.len());
                    kept.push((u, v));
                }
            }
        }
        let m = kept.len();
        Ok(Self::assemble(
            directed,
            labels,
            kept,
            vec![1.0; n],
            vec![1.0; m],
            vec![Orientation::Positive; m],
        ))
    }

    /// Nodes labelled `0..n`.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)], directed: bool) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges.to_vec(), directed)
    }

    fn assemble(
        directed: bool,
        labels: Vec<String>,
        edges: Vec<(NodeId, NodeId)>,
        node_weights: Vec<f64>,
        edge_weights: Vec<f64>,
        orientation: Vec<Orientation>,
    ) -> Self {
        let n = labels.len();
        let endpoints = edges
            .iter()
            .enumerate()
            .flat_map(|(e, &(u, v))| [(u, e), (v, e)]);
        let incident = Incidence::build(n, endpoints);
        let outgoing = Incidence::build(n, edges.iter().enumerate().map(|(e, &(u, _))| (u, e)));
        let incoming = Incidence::build(n, edges.iter().enumerate().map(|(e, &(_, v))| (v, e)));
        WeightedNetwork {
            directed,
            labels,
            edges,
            node_weights,
            edge_weights,
            orientation,
            incident,
            outgoing,
            incoming,
        }
    }

    pub fn with_node_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_len(self.node_count(), weights.len())?;
        for (v, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonpositiveWeight {
                    item: WeightedItem::Node(v),
                    value: w,
                });
            }
        }
        self.node_weights = weights;
        Ok(self)
    }

    /// Replaces the edge weight magnitudes. Orientation flags are unchanged.
    pub fn with_edge_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_len(self.edge_count(), weights.len())?;
        check_edge_weights(&weights)?;
        self.edge_weights = weights;
        Ok(self)
    }

    pub fn with_orientation(mut self, orientation: Vec<Orientation>) -> Result<Self> {
        check_len(self.edge_count(), orientation.len())?;
        self.orientation = orientation;
        Ok(self)
    }

    /// Copy with new edge weights; the caller guarantees they are positive.
    pub(crate) fn with_edge_weights_unchecked(&self, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), self.edge_count());
        debug_assert!(weights.iter().all(|&w| w > 0.0));
        let mut g = self.clone();
        g.edge_weights = weights;
        g
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// `(source, target)` for directed networks, insertion order otherwise.
    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_weight(&self, v: NodeId) -> f64 {
        self.node_weights[v]
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn edge_weight(&self, e: EdgeId) -> f64 {
        self.edge_weights[e]
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn orientation(&self, e: EdgeId) -> Orientation {
        self.orientation[e]
    }

    pub fn orientations(&self) -> &[Orientation] {
        &self.orientation
    }

    /// Number of incident edges, ignoring direction.
    pub fn degree(&self, v: NodeId) -> usize {
        self.incident.of(v).len()
    }

    pub fn incident_edges(&self, v: NodeId) -> &[EdgeId] {
        self.incident.of(v)
    }

    /// Edges whose source is `v`.
    pub fn outgoing_edges(&self, v: NodeId) -> &[EdgeId] {
        self.outgoing.of(v)
    }

    /// Edges whose target is `v`.
    pub fn incoming_edges(&self, v: NodeId) -> &[EdgeId] {
        self.incoming.of(v)
    }

    pub fn other_endpoint(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e < self.edge_count() {
            Ok(())
        } else {
            Err(Error::UnknownEdge(e))
        }
    }

    /// Label to node id map. Fails if two nodes share a label.
    pub fn label_index(&self) -> Result<HashMap<&str, NodeId>> {
        let mut index = HashMap::with_capacity(self.labels.len());
        for (v, label) in self.labels.iter().enumerate() {
            if index.insert(label.as_str(), v).is_some() {
                return Err(Error::LabelCollision(label.clone()));
            }
        }
        Ok(index)
    }

    /// Edge id for the endpoint pair, respecting direction.
    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let (scan, other) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.incident_edges(scan).iter().copied().find(|&e| {
            let (a, b) = self.edges[e];
            if self.directed {
                (a, b) == (u, v)
            } else {
                self.other_endpoint(e, scan) == other
            }
        })
    }

    /// Induced subgraph on `nodes`, keeping weights and orientations.
    /// New node ids follow the order of `nodes`; edges keep their relative order.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<Self> {
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            self.check_node(old)?;
            if remap[old] != usize::MAX {
                return Err(Error::InvalidConfig(format!("node {old} listed twice")));
            }
            remap[old] = new;
        }
        let mut edges = Vec::new();
        let mut weights = Vec::new();
        let mut orientation = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if remap[u] != usize::MAX && remap[v] != usize::MAX {
                edges.push((remap[u], remap[v]));
                weights.push(self.edge_weights[e]);
                orientation.push(self.orientation[e]);
            }
        }
        Ok(Self::assemble(
            self.directed,
            nodes.iter().map(|&v| self.labels[v].clone()).collect(),
            edges,
            nodes.iter().map(|&v| self.node_weights[v]).collect(),
            weights,
            orientation,
        ))
    }
}

fn edge_key(u: NodeId, v: NodeId, directed: bool) -> (NodeId, NodeId) {
    if directed || u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

pub(crate) fn check_edge_weights(weights: &[f64]) -> Result<()> {
    for (e, &w) in weights.iter().enumerate() {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::NonpositiveWeight {
                item: WeightedItem::Edge(e),
                value: w,
            });
        }
    }
    Ok(())
}

/// Outcome of [`NetworkBuilder::add_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeInsert {
    Added(EdgeId),
    /// Undirected duplicate merged into an existing edge.
    Collapsed(EdgeId),
}

/// Incremental construction from labelled edges.
///
/// Nodes are indexed by first appearance. Weights are given with sign; the
/// magnitude becomes the edge weight and the sign its orientation.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    directed: bool,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    weights: Vec<f64>,
    orientation: Vec<Orientation>,
    seen: HashMap<(NodeId, NodeId), EdgeId>,
}

impl NetworkBuilder {
    pub fn new(directed: bool) -> Self {
        NetworkBuilder {
            directed,
            ..Default::default()
        }
    }

    pub fn node(&mut self, label: &str) -> NodeId {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), v);
        v
    }

    pub fn add_edge(&mut self, a: &str, b: &str, weight: f64) -> Result<EdgeInsert> {
        if !(weight != 0.0 && weight.is_finite()) {
            return Err(Error::NonpositiveWeight {
                item: WeightedItem::Edge(self.edges.len()),
                value: weight,
            });
        }
        if a == b {
            let v = self.node(a);
            return Err(Error::SelfLoop(v));
        }
        let u = self.node(a);
        let v = self.node(b);
        match self.seen.entry(edge_key(u, v, self.directed)) {
            Entry::Occupied(_) if self.directed => Err(Error::DuplicateEdge(u, v)),
            Entry::Occupied(slot) => Ok(EdgeInsert::Collapsed(*slot.get())),
            Entry::Vacant(slot) => {
                let e = self.edges.len();
                slot.insert(e);
                self.edges.push((u, v));
                self.weights.push(weight.abs());
                self.orientation.push(Orientation::from_sign(weight));
                Ok(EdgeInsert::Added(e))
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn build(self) -> WeightedNetwork {
        let n = self.labels.len();
        WeightedNetwork::assemble(
            self.directed,
            self.labels,
            self.edges,
            vec![1.0; n],
            self.weights,
            self.orientation,
        )
    }
}
