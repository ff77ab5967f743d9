//! Degree-preserving null models for projection graphs.
//!
//! Randomization uses directed double-edge swaps `(a→b),(c→d) ⇒ (a→d),(c→b)`
//! driven by a ChaCha8 stream (see [`crate::rng`]), which is stable across
//! platforms. A swap is rejected when it would create a self-loop, a duplicate,
//! or a reciprocal pair, or when it would break up an existing reciprocal pair,
//! so the undirected view keeps its edge count exactly.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, PaperId};
use crate::metrics::{metric_vector, ConstraintVariant, Metric, MetricVector};
use crate::projection::{project, ProjectionPair};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats::{compare_samples, MetricComparison, DEFAULT_BINS};

pub const DEFAULT_SWAP_FACTOR: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizedGraph {
    /// Local-index edges over the source's cited set, sorted.
    pub edges: Vec<(usize, usize)>,
    pub source_focal: PaperId,
    pub seed: u64,
    pub attempted_swaps: usize,
    pub accepted_swaps: usize,
}

impl RandomizedGraph {
    /// The source projection with `G_p` replaced by the randomized edges;
    /// the focal paper's citations are unchanged.
    pub fn projection(&self, source: &ProjectionPair) -> ProjectionPair {
        source
            .with_gp_edges(self.edges.clone())
            .expect("randomized edges stay within the cited set")
    }
}

/// Runs `swap_factor · |E|` swap attempts on `G_p`. Graphs with fewer than two
/// edges come back unchanged.
pub fn randomize_degree_preserving(gp: &ProjectionPair, seed: u64, swap_factor: usize) -> RandomizedGraph {
    let mut edges = gp.gp_edges().to_vec();
    let m = edges.len();
    let mut attempted = 0;
    let mut accepted = 0;
    if m >= 2 {
        let mut present: HashSet<(usize, usize)> = edges.iter().copied().collect();
        let mut rng = rng_from_seed(seed);
        for _ in 0..swap_factor * m {
            let i = rng.gen_range(0..m);
            let j = rng.gen_range(0..m);
            attempted += 1;
            if i == j {
                continue;
            }
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if a == d || c == b {
                continue;
            }
            if present.contains(&(a, d)) || present.contains(&(c, b)) {
                continue;
            }
            if present.contains(&(d, a))
                || present.contains(&(b, c))
                || present.contains(&(b, a))
                || present.contains(&(d, c))
            {
                continue;
            }
            present.remove(&(a, b));
            present.remove(&(c, d));
            present.insert((a, d));
            present.insert((c, b));
            edges[i] = (a, d);
            edges[j] = (c, b);
            accepted += 1;
        }
    }
    edges.sort_unstable();
    RandomizedGraph {
        edges,
        source_focal: gp.focal().clone(),
        seed,
        attempted_swaps: attempted,
        accepted_swaps: accepted,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullModelConfig {
    pub samples_per_paper: usize,
    pub seed: u64,
    pub swap_factor: usize,
    pub constraint: ConstraintVariant,
    pub bins: usize,
}

impl Default for NullModelConfig {
    fn default() -> Self {
        NullModelConfig {
            samples_per_paper: 1,
            seed: 0,
            swap_factor: DEFAULT_SWAP_FACTOR,
            constraint: ConstraintVariant::StandardBurt,
            bins: DEFAULT_BINS,
        }
    }
}

/// Real-vs-randomized comparison; in each [`MetricComparison`] side `a` is real
/// and side `b` is random.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub focal_count: usize,
    pub samples_per_paper: usize,
    pub seed: u64,
    pub swap_factor: usize,
    pub metrics: Vec<MetricComparison>,
}

/// Metric vectors of each real projection and of its randomized samples.
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn real_and_random_vectors(
    pairs: &[ProjectionPair],
    cfg: &NullModelConfig,
) -> (Vec<MetricVector>, Vec<MetricVector>) {
    let per_pair: Vec<(MetricVector, Vec<MetricVector>)> = pairs
        .par_iter()
        .map(|pair| {
            let real = metric_vector(pair, cfg.constraint);
            let random = (0..cfg.samples_per_paper as u64)
                .map(|s| {
                    let seed = derive_seed(cfg.seed, pair.focal().as_str(), s);
                    let r = randomize_degree_preserving(pair, seed, cfg.swap_factor);
                    metric_vector(&r.projection(pair), cfg.constraint)
                })
                .collect();
            (real, random)
        })
        .collect();
    let mut real = Vec::with_capacity(pairs.len());
    let mut random = Vec::with_capacity(pairs.len() * cfg.samples_per_paper);
    for (r, rs) in per_pair {
        real.push(r);
        random.extend(rs);
    }
    (real, random)
}

pub fn compare_projection_pairs(pairs: &[ProjectionPair], cfg: &NullModelConfig) -> Result<ComparisonReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyFocalSet);
    }
    if cfg.samples_per_paper == 0 {
        return Err(Error::Config("samples per paper must be at least 1".into()));
    }
    let (real, random) = real_and_random_vectors(pairs, cfg);
    let metrics = Metric::NULL_MODEL
        .iter()
        .map(|&m| {
            let a: Vec<f64> = real.iter().map(|v| v.get(m)).collect();
            let b: Vec<f64> = random.iter().map(|v| v.get(m)).collect();
            compare_samples(m, &a, &b, cfg.bins)
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonReport {
        focal_count: pairs.len(),
        samples_per_paper: cfg.samples_per_paper,
        seed: cfg.seed,
        swap_factor: cfg.swap_factor,
        metrics,
    })
}

pub fn compare_real_vs_random(
    g: &CitationGraph,
    focal_set: &[PaperId],
    cfg: &NullModelConfig,
) -> Result<ComparisonReport> {
    if focal_set.is_empty() {
        return Err(Error::EmptyFocalSet);
    }
    let pairs = focal_set
        .iter()
        .map(|id| project(g, id))
        .collect::<Result<Vec<_>>>()?;
    compare_projection_pairs(&pairs, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(n: usize, edges: &[(usize, usize)]) -> ProjectionPair {
        let cited = (0..n).map(|i| PaperId::new(format!("c{i:02}")).unwrap()).collect();
        ProjectionPair::new(PaperId::new("v0").unwrap(), cited, edges.to_vec()).unwrap()
    }

    fn degrees(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
        let mut out = vec![0; n];
        let mut inc = vec![0; n];
        for &(u, v) in edges {
            out[u] += 1;
            inc[v] += 1;
        }
        (out, inc)
    }

    #[test]
    fn single_edge_unchanged() {
        let p = pair(2, &[(0, 1)]);
        let r = randomize_degree_preserving(&p, 7, 100);
        assert_eq!(r.edges, vec![(0, 1)]);
        assert_eq!(r.accepted_swaps, 0);
        assert_eq!(r.attempted_swaps, 0);
    }

    #[test]
    fn degrees_preserved_and_swaps_happen() {
        let edges: Vec<_> = (0..10).flat_map(|i| [(i, (i + 1) % 12), (i, (i + 3) % 12)]).collect();
        let p = pair(12, &edges);
        let r = randomize_degree_preserving(&p, 42, 100);
        // per-node degrees are preserved, which is stronger than multiset equality
        assert_eq!(degrees(12, &r.edges), degrees(12, p.gp_edges()));
        assert!(r.accepted_swaps > 0);
        assert_eq!(r.attempted_swaps, 100 * edges.len());
        assert_ne!(r.edges, p.gp_edges());
    }

    #[test]
    fn same_seed_same_edges() {
        let edges: Vec<_> = (0..8).flat_map(|i| [(i, i + 1), (i, i + 2)]).collect();
        let p = pair(10, &edges);
        let a = randomize_degree_preserving(&p, 3, 50);
        let b = randomize_degree_preserving(&p, 3, 50);
        assert_eq!(a, b);
        let c = randomize_degree_preserving(&p, 4, 50);
        assert_ne!(a.edges, c.edges);
    }

    #[test]
    fn empty_focal_set_is_error() {
        assert!(matches!(
            compare_projection_pairs(&[], &NullModelConfig::default()),
            Err(Error::EmptyFocalSet)
        ));
    }

    #[test]
    fn unchangeable_graphs_give_p_one() {
        let pairs: Vec<_> = (0..6)
            .map(|k| {
                let cited = (0..3 + k).map(|i| PaperId::new(format!("c{k}_{i}")).unwrap()).collect();
                ProjectionPair::new(PaperId::new(format!("v{k}")).unwrap(), cited, vec![(0, 1)]).unwrap()
            })
            .collect();
        let report = compare_projection_pairs(&pairs, &NullModelConfig::default()).unwrap();
        assert_eq!(report.metrics.len(), 5);
        for m in &report.metrics {
            let t = m.t_test.as_ref().unwrap();
            assert_eq!(t.t_statistic, 0.0, "{}", m.metric);
            assert!((t.p_value - 1.0).abs() < 1e-12, "{}", m.metric);
        }
    }
}
