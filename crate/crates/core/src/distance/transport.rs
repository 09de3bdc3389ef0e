//! Exact discrete optimal transport.
//!
//! [`transport_masses`] solves the transportation problem for an arbitrary
//! cost matrix with the transportation simplex (MODI potentials on a
//! spanning-tree basis). [`monotone_transport`] is the closed-form optimum for
//! costs `|p_i - q_j|` on the real line.

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `f_ij`, mass moved from source bin `i` to sink bin `j`.
    pub flow: DenseMatrix,
    /// `d_ij`.
    pub ground: DenseMatrix,
    /// `sum f_ij d_ij`.
    pub cost: f64,
    /// `cost / sum f_ij`.
    pub emd: f64,
}

impl TransportPlan {
    fn from_flow(flow: DenseMatrix, ground: DenseMatrix) -> Result<Self> {
        let moved = pairwise_sum(flow.as_slice());
        if moved <= 0.0 {
            return Err(Error::InfeasibleMasses("no mass to transport".into()));
        }
        let terms: Vec<f64> = flow
            .as_slice()
            .iter()
            .zip(ground.as_slice())
            .map(|(f, d)| f * d)
            .collect();
        let cost = pairwise_sum(&terms);
        Ok(TransportPlan {
            flow,
            ground,
            cost,
            emd: cost / moved,
        })
    }

    pub fn total_flow(&self) -> f64 {
        pairwise_sum(self.flow.as_slice())
    }

    pub fn transposed(&self) -> TransportPlan {
        let t = |m: &DenseMatrix| DenseMatrix::from_fn(m.cols(), m.rows(), |i, j| m[(j, i)]);
        TransportPlan {
            flow: t(&self.flow),
            ground: t(&self.ground),
            cost: self.cost,
            emd: self.emd,
        }
    }
}

fn check_masses(masses: &[f64], side: &str) -> Result<f64> {
    if masses.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(Error::InfeasibleMasses(format!("{side} mass {m}")));
    }
    Ok(pairwise_sum(masses))
}

/// Minimum-cost transport between `supply` and `demand` under `cost`.
///
/// Unequal totals move `min(total supply, total demand)`; the excess stays
/// put at zero cost.
pub fn transport_masses(supply: &[f64], demand: &[f64], cost: &DenseMatrix) -> Result<TransportPlan> {
    let total_supply = check_masses(supply, "supply")?;
    let total_demand = check_masses(demand, "demand")?;
    let (k1, k2) = (supply.len(), demand.len());
    if cost.rows() != k1 || cost.cols() != k2 {
        return Err(Error::LengthMismatch {
            expected: k1 * k2,
            actual: cost.rows() * cost.cols(),
        });
    }
    if cost.as_slice().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidConfig("ground distances must be finite".into()));
    }

    // Balance with a zero-cost dummy row or column.
    let mut a = supply.to_vec();
    let mut b = demand.to_vec();
    let excess = total_supply - total_demand;
    let (rows, cols) = if excess > 0.0 {
        b.push(excess);
        (k1, k2 + 1)
    } else if excess < 0.0 {
        a.push(-excess);
        (k1 + 1, k2)
    } else {
        (k1, k2)
    };
    let c = DenseMatrix::from_fn(rows, cols, |i, j| {
        if i < k1 && j < k2 {
            cost[(i, j)]
        } else {
            0.0
        }
    });
    let full = TransportationSimplex::new(&a, &b, &c).solve();
    let flow = DenseMatrix::from_fn(k1, k2, |i, j| full[(i, j)]);
    TransportPlan::from_flow(flow, cost.clone())
}

/// Optimal plan for `|p_i - q_j|` costs by the monotone (north-west corner on
/// sorted positions) coupling. Totals must agree to within `1e-9` relative.
pub fn monotone_transport(
    positions1: &[f64],
    masses1: &[f64],
    positions2: &[f64],
    masses2: &[f64],
) -> Result<TransportPlan> {
    if positions1.len() != masses1.len() || positions2.len() != masses2.len() {
        return Err(Error::LengthMismatch {
            expected: positions1.len().max(positions2.len()),
            actual: masses1.len().min(masses2.len()),
        });
    }
    let t1 = check_masses(masses1, "supply")?;
    let t2 = check_masses(masses2, "demand")?;
    if (t1 - t2).abs() > 1e-9 * t1.max(t2) {
        return Err(Error::InfeasibleMasses(format!(
            "1-D coupling needs equal totals, got {t1} and {t2}"
        )));
    }
    let order = |p: &[f64]| {
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.sort_by(|&x, &y| p[x].total_cmp(&p[y]));
        idx
    };
    let (o1, o2) = (order(positions1), order(positions2));
    let mut flow = DenseMatrix::zeros(masses1.len(), masses2.len());
    let (mut i, mut j) = (0, 0);
    let mut r1 = masses1[o1[0]];
    let mut r2 = masses2[o2[0]];
    loop {
        let x = r1.min(r2);
        flow[(o1[i], o2[j])] += x;
        r1 -= x;
        r2 -= x;
        if r1 <= r2 {
            i += 1;
            if i == o1.len() {
                break;
            }
            r1 = masses1[o1[i]];
        } else {
            j += 1;
            if j == o2.len() {
                break;
            }
            r2 = masses2[o2[j]];
        }
    }
    let ground = DenseMatrix::from_fn(masses1.len(), masses2.len(), |i, j| {
        (positions1[i] - positions2[j]).abs()
    });
    TransportPlan::from_flow(flow, ground)
}

/// Balanced transportation problem, `sum a == sum b` up to rounding.
struct TransportationSimplex<'a> {
    cost: &'a DenseMatrix,
    flow: DenseMatrix,
    /// Basic cells; always a spanning tree of the bipartite row/column graph.
    basis: Vec<(usize, usize)>,
    tolerance: f64,
}

impl<'a> TransportationSimplex<'a> {
    fn new(a: &[f64], b: &[f64], cost: &'a DenseMatrix) -> Self {
        let (k1, k2) = (a.len(), b.len());
        let mut flow = DenseMatrix::zeros(k1, k2);
        let mut basis = Vec::with_capacity(k1 + k2 - 1);
        let (mut ra, mut rb) = (a.to_vec(), b.to_vec());
        let (mut i, mut j) = (0, 0);
        // North-west corner start: k1 + k2 - 1 cells forming a staircase tree.
        loop {
            let x = ra[i].min(rb[j]);
            flow[(i, j)] = x;
            basis.push((i, j));
            ra[i] -= x;
            rb[j] -= x;
            if i + 1 == k1 && j + 1 == k2 {
                break;
            }
            if j + 1 == k2 || (i + 1 < k1 && ra[i] <= rb[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        let scale = cost.as_slice().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        TransportationSimplex {
            cost,
            flow,
            basis,
            tolerance: 1e-12 * scale.max(1.0),
        }
    }

    fn rows(&self) -> usize {
        self.flow.rows()
    }

    fn cols(&self) -> usize {
        self.flow.cols()
    }

    /// Tree adjacency: node ids are rows `0..k1` then columns `k1..k1+k2`.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let k1 = self.rows();
        let mut adj = vec![Vec::new(); k1 + self.cols()];
        for (b, &(i, j)) in self.basis.iter().enumerate() {
            adj[i].push((k1 + j, b));
            adj[k1 + j].push((i, b));
        }
        adj
    }

    /// Dual potentials with `u_i + v_j = c_ij` on every basic cell.
    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let k1 = self.rows();
        let mut pot = vec![f64::NAN; adj.len()];
        pot[0] = 0.0;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            for &(next, b) in &adj[node] {
                if pot[next].is_nan() {
                    let (i, j) = self.basis[b];
                    pot[next] = self.cost[(i, j)] - pot[node];
                    stack.push(next);
                }
            }
        }
        let v = pot.split_off(k1);
        (pot, v)
    }

    /// Basic cells on the tree path from column `j` to row `i`, in order.
    fn path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let k1 = self.rows();
        let start = k1 + j;
        let mut via = vec![usize::MAX; adj.len()];
        let mut parent = vec![usize::MAX; adj.len()];
        let mut stack = vec![start];
        parent[start] = start;
        while let Some(node) = stack.pop() {
            if node == i {
                break;
            }
            for &(next, b) in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    via[next] = b;
                    stack.push(next);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = i;
        while node != start {
            cells.push(via[node]);
            node = parent[node];
        }
        cells.reverse();
        cells
    }

    fn entering(&self, u: &[f64], v: &[f64], bland: bool) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let reduced = self.cost[(i, j)] - u[i] - v[j];
                if reduced < -self.tolerance {
                    if bland {
                        return Some((i, j));
                    }
                    if best.is_none_or(|(_, r)| reduced < r) {
                        best = Some(((i, j), reduced));
                    }
                }
            }
        }
        best.map(|(cell, _)| cell)
    }

    fn solve(mut self) -> DenseMatrix {
        let cap = 50 * (self.rows() * self.cols()) + 1000;
        let mut degenerate_run = 0;
        for _ in 0..cap {
            let adj = self.adjacency();
            let (u, v) = self.potentials(&adj);
            let bland = degenerate_run > self.rows() + self.cols();
            let Some((i, j)) = self.entering(&u, &v, bland) else {
                return self.flow;
            };
            // Cycle: entering cell (+), then path cells alternating -, +, ...
            let path = self.path(&adj, i, j);
            let mut leaving: Option<usize> = None;
            for &b in path.iter().step_by(2) {
                let x = self.flow[self.basis[b]];
                let better = match leaving {
                    None => true,
                    Some(l) => {
                        let current = self.flow[self.basis[l]];
                        x < current || (x == current && bland && b < l)
                    }
                };
                if better {
                    leaving = Some(b);
                }
            }
            let leaving = leaving.expect("a cycle always has a decreasing cell");
            let theta = self.flow[self.basis[leaving]];
            degenerate_run = if theta == 0.0 { degenerate_run + 1 } else { 0 };
            self.flow[(i, j)] += theta;
            for (k, &b) in path.iter().enumerate() {
                let cell = self.basis[b];
                if k % 2 == 0 {
                    self.flow[cell] = (self.flow[cell] - theta).max(0.0);
                } else {
                    self.flow[cell] += theta;
                }
            }
            self.flow[self.basis[leaving]] = 0.0;
            self.basis[leaving] = (i, j);
        }
        log::warn!("transportation simplex hit its iteration cap");
        self.flow
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_cost(p: &[f64], q: &[f64]) -> DenseMatrix {
        DenseMatrix::from_fn(p.len(), q.len(), |i, j| (p[i] - q[j]).abs())
    }

    #[test]
    fn identical_distributions_cost_nothing() {
        let p = [0.0, 1.0, 2.0];
        let m = [0.2, 0.5, 0.3];
        let plan = transport_masses(&m, &m, &line_cost(&p, &p)).unwrap();
        assert_eq!(plan.cost, 0.0);
        for i in 0..3 {
            assert_relative_eq!(plan.flow[(i, i)], m[i]);
        }
        let mono = monotone_transport(&p, &m, &p, &m).unwrap();
        assert_eq!(mono.cost, 0.0);
    }

    #[test]
    fn point_masses() {
        let plan = transport_masses(&[1.0], &[1.0], &line_cost(&[0.0], &[1.0])).unwrap();
        assert_eq!(plan.cost, 1.0);
        assert_eq!(plan.emd, 1.0);
    }

    #[test]
    fn split_to_single_bin() {
        let plan = transport_masses(&[0.5, 0.5], &[1.0], &line_cost(&[0.0, 1.0], &[0.0])).unwrap();
        assert_relative_eq!(plan.emd, 0.5);
        let mono = monotone_transport(&[0.0, 1.0], &[0.5, 0.5], &[0.0], &[1.0]).unwrap();
        assert_relative_eq!(mono.emd, 0.5);
    }

    #[test]
    fn unbalanced_moves_the_smaller_total() {
        let cost = line_cost(&[0.0, 5.0], &[1.0]);
        let plan = transport_masses(&[1.0, 1.0], &[1.0], &cost).unwrap();
        assert_relative_eq!(plan.total_flow(), 1.0);
        assert_relative_eq!(plan.cost, 1.0);
        let plan = transport_masses(&[0.5], &[1.0, 1.0], &line_cost(&[0.0], &[3.0, 1.0])).unwrap();
        assert_relative_eq!(plan.total_flow(), 0.5);
        assert_relative_eq!(plan.emd, 1.0);
    }

    #[test]
    fn general_cost_matrix() {
        // Assignment-like instance whose optimum is the anti-diagonal.
        let cost = DenseMatrix::from_fn(3, 3, |i, j| if i + j == 2 { 1.0 } else { 10.0 });
        let plan = transport_masses(&[1.0; 3], &[1.0; 3], &cost).unwrap();
        assert_relative_eq!(plan.cost, 3.0);
        assert_relative_eq!(plan.flow[(0, 2)], 1.0);
    }

    #[test]
    fn rejects_bad_masses() {
        let cost = line_cost(&[0.0], &[0.0]);
        assert!(matches!(
            transport_masses(&[-1.0], &[1.0], &cost),
            Err(Error::InfeasibleMasses(_))
        ));
        assert!(matches!(
            transport_masses(&[], &[1.0], &cost),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            monotone_transport(&[0.0], &[1.0], &[0.0], &[2.0]),
            Err(Error::InfeasibleMasses(_))
        ));
        assert!(transport_masses(&[0.0], &[0.0], &cost).is_err());
    }

    #[test]
    fn monotone_handles_unsorted_positions() {
        let a = monotone_transport(&[2.0, 0.0], &[0.5, 0.5], &[1.0, 3.0], &[0.5, 0.5]).unwrap();
        assert_relative_eq!(a.cost, 1.0);
        assert_relative_eq!(a.flow[(1, 0)], 0.5);
        assert_relative_eq!(a.flow[(0, 1)], 0.5);
    }
}
