//! Seeded random graph models and snowball subsampling.
//!
//! All randomness comes from [`RNG_ALGORITHM`] seeded with the 64-bit seed
//! in the spec, so the same spec yields the same edge list on every
//! platform.

use std::collections::{HashSet, VecDeque};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightedNetwork};

/// Name of the generator behind every seeded operation in this module.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    ErdosRenyi { n: usize, p: f64 },
    WattsStrogatz { n: usize, k_ring: usize, beta: f64 },
    AlbertBarabasi { n: usize, m_attach: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: Model, seed: u64) -> Result<Self> {
        let spec = GeneratorSpec { model, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        let n = match self.model {
            Model::ErdosRenyi { n, .. }
            | Model::WattsStrogatz { n, .. }
            | Model::AlbertBarabasi { n, .. } => n,
        };
        if n < 2 {
            return invalid(format!("n must be at least 2, got {n}"));
        }
        match self.model {
            Model::ErdosRenyi { p, .. } if !(0.0..=1.0).contains(&p) => {
                invalid(format!("p must lie in [0, 1], got {p}"))
            }
            Model::WattsStrogatz { k_ring, beta, .. } => {
                if k_ring % 2 != 0 {
                    invalid(format!("k_ring must be even, got {k_ring}"))
                } else if k_ring >= n {
                    invalid(format!("k_ring must be below n, got {k_ring} >= {n}"))
                } else if !(0.0..=1.0).contains(&beta) {
                    invalid(format!("beta must lie in [0, 1], got {beta}"))
                } else {
                    Ok(())
                }
            }
            Model::AlbertBarabasi { m_attach, .. } if m_attach < 1 || m_attach >= n => {
                invalid(format!("m_attach must satisfy 1 <= m < n, got {m_attach}"))
            }
            _ => Ok(()),
        }
    }
}

/// Simple undirected graph with unit weights, nodes labelled `0..n`.
pub fn generate(spec: &GeneratorSpec) -> Result<WeightedNetwork> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let (n, edges) = match spec.model {
        Model::ErdosRenyi { n, p } => (n, erdos_renyi(n, p, &mut rng)),
        Model::WattsStrogatz { n, k_ring, beta } => (n, watts_strogatz(n, k_ring, beta, &mut rng)),
        Model::AlbertBarabasi { n, m_attach } => (n, albert_barabasi(n, m_attach, &mut rng)),
    };
    WeightedNetwork::from_edges(n, &edges, false)
}

/// G(n, p) by geometric skipping over the lower triangle (Batagelj & Brandes).
fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    if p <= 0.0 {
        return edges;
    }
    if p >= 1.0 {
        for v in 1..n {
            edges.extend((0..v).map(|w| (w, v)));
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

/// Ring lattice of degree `k`, then each lattice edge `(u, u+j)` is rewired
/// with probability `beta` to a uniformly chosen non-neighbour.
fn watts_strogatz(n: usize, k: usize, beta: f64, rng: &mut impl Rng) -> Vec<(NodeId, NodeId)> {
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n * k / 2);
    for j in 1..=k / 2 {
        edges.extend((0..n).map(|u| (u, (u + j) % n)));
    }
    if beta == 0.0 {
        return edges;
    }
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(u, v)| key(u, v)).collect();
    let mut degree = vec![k; n];
    for slot in edges.iter_mut() {
        let (u, v) = *slot;
        if !rng.random_bool(beta) || degree[u] >= n - 1 {
            continue;
        }
        let w = loop {
            let w = rng.random_range(0..n);
            if w != u && !present.contains(&key(u, w)) {
                break w;
            }
        };
        present.remove(&key(u, v));
        present.insert(key(u, w));
        degree[v] -= 1;
        degree[w] += 1;
        *slot = (u, w);
    }
    edges
}

/// Preferential attachment: nodes `m..n` each attach to `m` distinct
/// targets drawn in proportion to degree, starting from `m` isolated seeds.
fn albert_barabasi(n: usize, m: usize, rng: &mut impl Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::with_capacity((n - m) * m);
    let mut repeated: Vec<NodeId> = Vec::with_capacity(2 * (n - m) * m);
    let mut targets: Vec<NodeId> = (0..m).collect();
    let mut chosen = HashSet::with_capacity(m);
    for source in m..n {
        for &t in &targets {
            edges.push((t, source));
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(source, m));
        chosen.clear();
        targets.clear();
        while targets.len() < m {
            let &t = repeated.choose(rng).expect("non-empty after first step");
            if chosen.insert(t) {
                targets.push(t);
            }
        }
    }
    edges
}

/// Breadth-first snowball sample of `n_target` nodes from a random root,
/// returned as an induced subgraph. When the root's component runs out,
/// sampling restarts from a random unvisited node.
pub fn sample_subgraph(g: &WeightedNetwork, n_target: usize, seed: u64) -> Result<WeightedNetwork> {
    let n = g.node_count();
    if n_target > n {
        return Err(Error::TargetTooLarge {
            target: n_target,
            available: n,
        });
    }
    let mut rng = seeded_rng(seed);
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n_target);
    let mut queue = VecDeque::new();
    while order.len() < n_target {
        if queue.is_empty() {
            let unvisited: Vec<NodeId> = (0..n).filter(|&v| !visited[v]).collect();
            let &root = unvisited.choose(&mut rng).expect("target below node count");
            visited[root] = true;
            order.push(root);
            queue.push_back(root);
            continue;
        }
        let v = queue.pop_front().expect("checked non-empty");
        for &e in g.incident_edges(v) {
            if order.len() == n_target {
                break;
            }
            let u = g.other_endpoint(e, v);
            if !visited[u] {
                visited[u] = true;
                order.push(u);
                queue.push_back(u);
            }
        }
    }
    g.induced_subgraph(&order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(model: Model, seed: u64) -> GeneratorSpec {
        GeneratorSpec::new(model, seed).unwrap()
    }

    #[test]
    fn er_extremes() {
        let g = generate(&spec(Model::ErdosRenyi { n: 30, p: 0.0 }, 1)).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = generate(&spec(Model::ErdosRenyi { n: 30, p: 1.0 }, 1)).unwrap();
        assert_eq!(g.edge_count(), 435);
    }

    #[test]
    fn ws_without_rewiring_is_a_ring_lattice() {
        let g = generate(&spec(Model::WattsStrogatz { n: 20, k_ring: 4, beta: 0.0 }, 3)).unwrap();
        assert_eq!(g.edge_count(), 40);
        assert!((0..20).all(|v| g.degree(v) == 4));
        assert!(g.find_edge(19, 1).is_some());
    }

    #[test]
    fn ws_rewiring_keeps_edge_count_and_simplicity() {
        let g = generate(&spec(Model::WattsStrogatz { n: 200, k_ring: 6, beta: 0.3 }, 9)).unwrap();
        assert_eq!(g.edge_count(), 600);
    }

    #[test]
    fn ab_edge_count() {
        let g = generate(&spec(Model::AlbertBarabasi { n: 500, m_attach: 3 }, 5)).unwrap();
        assert_eq!(g.edge_count(), (500 - 3) * 3);
        assert!((3..500).all(|v| g.degree(v) >= 3));
    }

    #[test]
    fn same_seed_same_graph() {
        for model in [
            Model::ErdosRenyi { n: 100, p: 0.05 },
            Model::WattsStrogatz { n: 100, k_ring: 4, beta: 0.2 },
            Model::AlbertBarabasi { n: 100, m_attach: 2 },
        ] {
            let a = generate(&spec(model, 42)).unwrap();
            let b = generate(&spec(model, 42)).unwrap();
            let c = generate(&spec(model, 43)).unwrap();
            assert_eq!(a.edges(), b.edges());
            assert_ne!(a.edges(), c.edges());
        }
    }

    #[test]
    fn invalid_specs() {
        for model in [
            Model::ErdosRenyi { n: 1, p: 0.5 },
            Model::ErdosRenyi { n: 10, p: 1.5 },
            Model::WattsStrogatz { n: 10, k_ring: 3, beta: 0.1 },
            Model::WattsStrogatz { n: 10, k_ring: 4, beta: -0.1 },
            Model::AlbertBarabasi { n: 10, m_attach: 0 },
            Model::AlbertBarabasi { n: 10, m_attach: 10 },
        ] {
            assert!(matches!(GeneratorSpec::new(model, 0), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn sampling_edge_cases() {
        let g = generate(&spec(Model::AlbertBarabasi { n: 50, m_attach: 2 }, 0)).unwrap();
        let all = sample_subgraph(&g, 50, 7).unwrap();
        assert_eq!((all.node_count(), all.edge_count()), (50, g.edge_count()));
        let one = sample_subgraph(&g, 1, 7).unwrap();
        assert_eq!((one.node_count(), one.edge_count()), (1, 0));
        assert!(matches!(
            sample_subgraph(&g, 51, 7),
            Err(Error::TargetTooLarge { target: 51, available: 50 })
        ));
    }

    #[test]
    fn sampling_spans_components() {
        let g = WeightedNetwork::from_edges(6, &[(0, 1), (2, 3), (4, 5)], false).unwrap();
        let s = sample_subgraph(&g, 5, 1).unwrap();
        assert_eq!(s.node_count(), 5);
    }
}
