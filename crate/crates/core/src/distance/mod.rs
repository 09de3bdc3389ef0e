//! Curvature-based dissimilarity of graphs.
//!
//! Each graph's edge curvatures are smoothed with a kernel density estimate,
//! the density is sampled at the midpoints of `k` equal-width bins, and the
//! two binned distributions are compared with the earth mover's distance
//! under the ground distance `|p_i - q_j|`.

mod kde;
mod transport;

pub use kde::{silverman_bandwidth, Bandwidth, Kernel, KernelDensity};
pub use transport::{monotone_transport, transport_masses, TransportPlan};

use std::cmp::Ordering;

use crate::curvature::curvature_field;
use crate::error::{Error, Result};
use crate::graph::WeightedNetwork;
use crate::numeric::{pairwise_sum, DenseMatrix};

pub const DEFAULT_BINS: usize = 100;
/// Support padding on each side, in bandwidths.
pub const DEFAULT_PADDING: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    /// Interval midpoint.
    pub representative: f64,
    pub mass: f64,
}

/// Binned distribution; bins partition `[first.lo, last.hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureDistribution {
    pub bins: Vec<Bin>,
    pub total_mass: f64,
}

impl CurvatureDistribution {
    pub fn representatives(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.representative).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.mass).collect()
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// Kernel density estimate of a curvature sample.
pub fn curvature_density(curvatures: &[f64], kernel: Kernel, bandwidth: Bandwidth) -> Result<KernelDensity> {
    KernelDensity::new(curvatures, kernel, bandwidth)
}

/// Splits `support` into `k` equal bins and weighs each by the density at
/// its midpoint; masses are renormalized to sum to 1.
pub fn bin_distribution(
    density: impl Fn(f64) -> f64,
    support: (f64, f64),
    k: usize,
) -> Result<CurvatureDistribution> {
    let (lo, hi) = support;
    if k == 0 {
        return Err(Error::InvalidConfig("bin count must be at least 1".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::DegenerateSupport(format!("[{lo}, {hi}]")));
    }
    let width = (hi - lo) / k as f64;
    let edge = |i: usize| if i == k { hi } else { lo + i as f64 * width };
    let mut bins: Vec<Bin> = (0..k)
        .map(|i| {
            let (a, b) = (edge(i), edge(i + 1));
            let mid = 0.5 * (a + b);
            Bin {
                lo: a,
                hi: b,
                representative: mid,
                mass: density(mid).max(0.0),
            }
        })
        .collect();
    let total = pairwise_sum(&bins.iter().map(|b| b.mass).collect::<Vec<_>>());
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateSupport(
            "density vanishes at every bin midpoint".into(),
        ));
    }
    for b in &mut bins {
        b.mass /= total;
    }
    Ok(CurvatureDistribution {
        bins,
        total_mass: 1.0,
    })
}

/// `d_ij = |p1_i - p2_j|`.
pub fn ground_distance(p1: &CurvatureDistribution, p2: &CurvatureDistribution) -> DenseMatrix {
    DenseMatrix::from_fn(p1.len(), p2.len(), |i, j| {
        (p1.bins[i].representative - p2.bins[j].representative).abs()
    })
}

/// Optimal transport between two binned distributions under `d`.
pub fn solve_transport(
    p1: &CurvatureDistribution,
    p2: &CurvatureDistribution,
    d: &DenseMatrix,
) -> Result<TransportPlan> {
    transport_masses(&p1.masses(), &p2.masses(), d)
}

/// Where the two distributions are binned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinGrid {
    /// One grid over the union of both supports.
    #[default]
    Shared,
    /// Each distribution on its own support.
    PerGraph,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceParams {
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
    pub bins: usize,
    pub grid: BinGrid,
    /// Support padding beyond the sample range, in bandwidths.
    pub padding: f64,
}

impl Default for DistanceParams {
    fn default() -> Self {
        DistanceParams {
            kernel: Kernel::Gaussian,
            bandwidth: Bandwidth::Silverman,
            bins: DEFAULT_BINS,
            grid: BinGrid::Shared,
            padding: DEFAULT_PADDING,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub emd: f64,
    pub first: CurvatureDistribution,
    pub second: CurvatureDistribution,
    pub bandwidths: (f64, f64),
    pub plan: TransportPlan,
}

/// Earth mover's distance between the binned densities of two curvature
/// samples. Exactly symmetric in its arguments.
pub fn distribution_distance(c1: &[f64], c2: &[f64], params: &DistanceParams) -> Result<DistanceReport> {
    if !(params.padding >= 0.0 && params.padding.is_finite()) {
        return Err(Error::InvalidConfig(format!("padding {}", params.padding)));
    }
    let f1 = curvature_density(c1, params.kernel, params.bandwidth)?;
    let f2 = curvature_density(c2, params.kernel, params.bandwidth)?;
    let pad = params.padding;
    let own = |f: &KernelDensity| (f.min() - pad * f.bandwidth(), f.max() + pad * f.bandwidth());
    let (s1, s2) = match params.grid {
        BinGrid::Shared => {
            let h = f1.bandwidth().max(f2.bandwidth());
            let s = (
                f1.min().min(f2.min()) - pad * h,
                f1.max().max(f2.max()) + pad * h,
            );
            (s, s)
        }
        BinGrid::PerGraph => (own(&f1), own(&f2)),
    };
    let first = bin_distribution(|x| f1.evaluate(x), s1, params.bins)?;
    let second = bin_distribution(|x| f2.evaluate(x), s2, params.bins)?;

    // Solve in a canonical order so swapping the inputs replays the same
    // arithmetic.
    let swapped = compare_distributions(&first, &second) == Ordering::Greater;
    let (a, b) = if swapped { (&second, &first) } else { (&first, &second) };
    let plan = monotone_transport(&a.representatives(), &a.masses(), &b.representatives(), &b.masses())?;
    let plan = if swapped { plan.transposed() } else { plan };
    Ok(DistanceReport {
        emd: plan.emd,
        first,
        second,
        bandwidths: (f1.bandwidth(), f2.bandwidth()),
        plan,
    })
}

fn compare_distributions(a: &CurvatureDistribution, b: &CurvatureDistribution) -> Ordering {
    let key = |d: &CurvatureDistribution| {
        d.bins
            .iter()
            .flat_map(|bin| [bin.representative, bin.mass])
            .collect::<Vec<_>>()
    };
    let (ka, kb) = (key(a), key(b));
    ka.iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| ka.len().cmp(&kb.len()))
}

/// Curvature-distribution distance between two networks.
pub fn graph_distance(g1: &WeightedNetwork, g2: &WeightedNetwork, params: &DistanceParams) -> Result<f64> {
    if g1.edge_count() == 0 || g2.edge_count() == 0 {
        return Err(Error::EmptyInput);
    }
    let c1 = curvature_field(g1).edge;
    let c2 = curvature_field(g2).edge;
    distribution_distance(&c1, &c2, params).map(|r| r.emd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_bin() {
        let d = bin_distribution(|_| 0.3, (-1.0, 3.0), 1).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.bins[0].mass, 1.0);
        assert_eq!(d.bins[0].representative, 1.0);
    }

    #[test]
    fn uniform_density_gives_equal_masses() {
        let d = bin_distribution(|_| 0.25, (0.0, 4.0), 4).unwrap();
        assert!(d.masses().iter().all(|&m| m == 0.25));
        assert_eq!(d.representatives(), vec![0.5, 1.5, 2.5, 3.5]);
        assert_eq!(d.bins[3].hi, 4.0);
        for w in d.bins.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
    }

    #[test]
    fn gaussian_middle_bin_heaviest() {
        let d = bin_distribution(|x| (-0.5 * x * x).exp(), (-3.0, 3.0), 3).unwrap();
        let m = d.masses();
        assert!(m[1] > m[0] && m[1] > m[2]);
        assert_relative_eq!(m.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn binning_errors() {
        assert!(matches!(
            bin_distribution(|_| 1.0, (1.0, 1.0), 3),
            Err(Error::DegenerateSupport(_))
        ));
        assert!(bin_distribution(|_| 1.0, (0.0, 1.0), 0).is_err());
        assert!(matches!(
            bin_distribution(|_| 0.0, (0.0, 1.0), 3),
            Err(Error::DegenerateSupport(_))
        ));
    }

    #[test]
    fn ground_distance_examples() {
        let one = |p: &[f64]| CurvatureDistribution {
            bins: p
                .iter()
                .map(|&x| Bin {
                    lo: x - 0.5,
                    hi: x + 0.5,
                    representative: x,
                    mass: 1.0 / p.len() as f64,
                })
                .collect(),
            total_mass: 1.0,
        };
        let d = ground_distance(&one(&[0.0, 1.0]), &one(&[0.0, 1.0]));
        assert_eq!((d[(0, 0)], d[(1, 1)]), (0.0, 0.0));
        assert_eq!(ground_distance(&one(&[0.0]), &one(&[3.0]))[(0, 0)], 3.0);
        let d = ground_distance(&one(&[0.0, 1.0]), &one(&[2.0]));
        assert_eq!((d[(0, 0)], d[(1, 0)]), (2.0, 1.0));

        let plan = solve_transport(&one(&[0.0, 1.0]), &one(&[0.0]), &ground_distance(&one(&[0.0, 1.0]), &one(&[0.0]))).unwrap();
        assert_relative_eq!(plan.emd, 0.5);
    }

    #[test]
    fn per_graph_grid_runs() {
        let params = DistanceParams {
            grid: BinGrid::PerGraph,
            ..Default::default()
        };
        let r = distribution_distance(&[0.0, 1.0, 2.0], &[5.0, 6.0, 7.0], &params).unwrap();
        assert_relative_eq!(r.emd, 5.0, epsilon = 0.05);
    }

    #[test]
    fn empty_graph_rejected() {
        let g = WeightedNetwork::from_edges(2, &[], false).unwrap();
        let h = WeightedNetwork::from_edges(2, &[(0, 1)], false).unwrap();
        assert!(matches!(
            graph_distance(&g, &h, &DistanceParams::default()),
            Err(Error::EmptyInput)
        ));
    }
}
