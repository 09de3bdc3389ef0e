//! Change detection between two snapshots of an evolving network.
//!
//! Edges are matched across snapshots by their endpoint labels. Both
//! snapshots are normalized on a common scale, evolved by `K` steps of the
//! standard Ricci flow, and each shared edge's final weights are compared.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowConfig, FlowVariant};
use crate::graph::{EdgeId, WeightedNetwork};

/// Flow step used by [`ChangeParams::default`].
pub const DEFAULT_CHANGE_DT: f64 = 0.005;
pub const DEFAULT_CHANGE_STEPS: usize = 10;
pub const DEFAULT_CHANGE_THRESHOLD: f64 = 0.1;

/// Two snapshots with their edges matched by endpoint labels.
#[derive(Debug, Clone)]
pub struct SnapshotPair {
    pub a: WeightedNetwork,
    pub b: WeightedNetwork,
    /// `(edge in a, edge in b)`, in edge order of `a`.
    pub shared: Vec<(EdgeId, EdgeId)>,
    /// Edges of `b` absent from `a`.
    pub added: Vec<EdgeId>,
    /// Edges of `a` absent from `b`.
    pub removed: Vec<EdgeId>,
}

fn edge_key<'g>(g: &'g WeightedNetwork, e: EdgeId) -> (&'g str, &'g str) {
    let (u, v) = g.endpoints(e);
    let (lu, lv) = (g.label(u), g.label(v));
    if !g.is_directed() && lv < lu {
        (lv, lu)
    } else {
        (lu, lv)
    }
}

/// Matches edges by `(min label, max label)`, or by the ordered label pair
/// when the snapshots are directed.
pub fn align_edges(a: &WeightedNetwork, b: &WeightedNetwork) -> Result<SnapshotPair> {
    if a.is_directed() != b.is_directed() {
        return Err(Error::InvalidConfig(
            "snapshots disagree on directedness".into(),
        ));
    }
    a.label_index()?;
    b.label_index()?;
    let in_b: HashMap<(&str, &str), EdgeId> =
        (0..b.edge_count()).map(|e| (edge_key(b, e), e)).collect();
    let mut shared = Vec::new();
    let mut removed = Vec::new();
    let mut matched = vec![false; b.edge_count()];
    for e in 0..a.edge_count() {
        match in_b.get(&edge_key(a, e)) {
            Some(&f) => {
                shared.push((e, f));
                matched[f] = true;
            }
            None => removed.push(e),
        }
    }
    let added = (0..b.edge_count()).filter(|&f| !matched[f]).collect();
    Ok(SnapshotPair {
        a: a.clone(),
        b: b.clone(),
        shared,
        added,
        removed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeParams {
    pub dt: f64,
    /// Flow steps; 0 compares the normalized input weights directly.
    pub steps: usize,
    pub threshold: f64,
}

impl Default for ChangeParams {
    fn default() -> Self {
        ChangeParams {
            dt: DEFAULT_CHANGE_DT,
            steps: DEFAULT_CHANGE_STEPS,
            threshold: DEFAULT_CHANGE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChangeReport {
    /// `(edge in a, edge in b, |w_a - w_b|)` after the flow.
    pub deviations: Vec<(EdgeId, EdgeId, f64)>,
    /// Indices into `deviations` exceeding the threshold.
    pub flagged: Vec<usize>,
    pub added: Vec<EdgeId>,
    pub removed: Vec<EdgeId>,
    pub params: ChangeParams,
}

impl ChangeReport {
    /// Shared edges (as ids in `a`) whose deviation exceeds the threshold.
    pub fn flagged_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.flagged.iter().map(|&i| self.deviations[i].0)
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Divides node and edge weights of both snapshots by the largest value
/// found in either, so a uniform rescaling of one snapshot stays visible.
pub fn normalize_jointly(
    a: &WeightedNetwork,
    b: &WeightedNetwork,
) -> Result<(WeightedNetwork, WeightedNetwork)> {
    if a.edge_count() == 0 && b.edge_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let node_max = max_of(a.node_weights()).max(max_of(b.node_weights()));
    let edge_max = max_of(a.edge_weights()).max(max_of(b.edge_weights()));
    let scale = |g: &WeightedNetwork| -> Result<WeightedNetwork> {
        let nodes = g.node_weights().iter().map(|w| w / node_max).collect();
        let edges = g.edge_weights().iter().map(|w| w / edge_max).collect();
        g.clone().with_node_weights(nodes)?.with_edge_weights(edges)
    };
    Ok((scale(a)?, scale(b)?))
}

/// Flags shared edges whose weights diverge after `K` flow steps.
pub fn detect_changes(pair: &SnapshotPair, params: &ChangeParams) -> Result<ChangeReport> {
    if !(params.threshold >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "threshold must be non-negative, got {}",
            params.threshold
        )));
    }
    let (a, b) = normalize_jointly(&pair.a, &pair.b)?;
    let (wa, wb) = if params.steps == 0 {
        (a.edge_weights().to_vec(), b.edge_weights().to_vec())
    } else {
        let cfg = FlowConfig::new(params.dt, params.steps, FlowVariant::Standard)?;
        let (ra, rb) = rayon::join(|| run_flow(&a, &cfg), || run_flow(&b, &cfg));
        (ra?.0.edge_weights().to_vec(), rb?.0.edge_weights().to_vec())
    };
    let deviations: Vec<(EdgeId, EdgeId, f64)> = pair
        .shared
        .iter()
        .map(|&(e, f)| (e, f, (wa[e] - wb[f]).abs()))
        .collect();
    let flagged = deviations
        .iter()
        .enumerate()
        .filter(|(_, d)| d.2 > params.threshold)
        .map(|(i, _)| i)
        .collect();
    Ok(ChangeReport {
        deviations,
        flagged,
        added: pair.added.clone(),
        removed: pair.removed.clone(),
        params: *params,
    })
}
