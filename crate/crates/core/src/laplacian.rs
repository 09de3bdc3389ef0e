//! Edge-indexed Riemann-Laplace operator and its Bochner decomposition.
//!
//! On a graph there are no 2-cells, so only node ("child") terms survive:
//!
//! ```text
//! L(e, e)   = sum_{v ~ e} w_v / w_e
//! L(e1, e2) = sum_{v ~ e1, v ~ e2} eps * w_v / sqrt(w_e1 * w_e2)
//! ```
//!
//! `L = B + F` where `F = diag(Ric)` is the curvature part and `B` the rough
//! (Bochner) Laplacian that drives the Laplacian flow.

use crate::curvature::curvature_field;
use crate::graph::{EdgeId, WeightedNetwork};
use crate::numeric::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOperator {
    laplacian: CsrMatrix,
    diagonal_curvature: Vec<f64>,
}

impl EdgeOperator {
    /// Number of edges.
    pub fn dimension(&self) -> usize {
        self.laplacian.dim()
    }

    pub fn entry(&self, e1: EdgeId, e2: EdgeId) -> f64 {
        self.laplacian.get(e1, e2)
    }

    pub fn laplacian(&self) -> &CsrMatrix {
        &self.laplacian
    }

    pub fn diagonal_curvature(&self) -> &[f64] {
        &self.diagonal_curvature
    }

    /// `L - diag(Ric)`.
    pub fn rough_laplacian(&self) -> CsrMatrix {
        self.laplacian.minus_diagonal(&self.diagonal_curvature)
    }
}

/// Relative orientation of two edges meeting at a node. Undirected networks
/// use `+1` throughout.
fn relative_orientation(g: &WeightedNetwork, e1: EdgeId, e2: EdgeId) -> f64 {
    if g.is_directed() {
        g.orientation(e1).sign() * g.orientation(e2).sign()
    } else {
        1.0
    }
}

pub fn bochner_laplacian(g: &WeightedNetwork) -> EdgeOperator {
    let rows = (0..g.edge_count())
        .map(|e| {
            let (u, v) = g.endpoints(e);
            let we = g.edge_weight(e);
            let mut row = Vec::with_capacity(g.degree(u) + g.degree(v));
            for node in [u, v] {
                let wv = g.node_weight(node);
                for &f in g.incident_edges(node) {
                    let value = if f == e {
                        wv / we
                    } else {
                        relative_orientation(g, e, f) * wv / (we * g.edge_weight(f)).sqrt()
                    };
                    row.push((f, value));
                }
            }
            row
        })
        .collect();
    EdgeOperator {
        laplacian: CsrMatrix::from_rows(rows),
        diagonal_curvature: curvature_field(g).edge,
    }
}
