//! Structural metrics of citation projection graphs.
//!
//! Every metric runs on the simple undirected view of the projection: edge
//! direction is dropped and reciprocal pairs merge. Density, clustering,
//! connectivity and maximum betweenness describe `G_p`; focal betweenness and
//! focal constraint describe the focal paper inside `G_p0`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::projection::ProjectionPair;

/// Simple undirected graph over `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedView {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl UndirectedView {
    /// Drops direction, self-loops and parallel edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut twice = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        UndirectedView {
            adj,
            edge_count: twice / 2,
        }
    }

    pub fn gp(pair: &ProjectionPair) -> Self {
        Self::from_edges(pair.n_cited(), pair.gp_edges())
    }

    pub fn gp0(pair: &ProjectionPair) -> Self {
        Self::from_edges(pair.n_cited() + 1, &pair.gp0_edges())
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// `2|E| / (|V|(|V|-1))`, zero below two nodes.
    pub fn density(&self) -> f64 {
        let n = self.node_count();
        if n < 2 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / (n * (n - 1)) as f64
    }

    pub fn local_clustering(&self, v: usize) -> f64 {
        let nbrs = &self.adj[v];
        let d = nbrs.len();
        if d < 2 {
            return 0.0;
        }
        let mut closed = 0usize;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if self.has_edge(a, b) {
                    closed += 1;
                }
            }
        }
        closed as f64 / (d * (d - 1) / 2) as f64
    }

    /// Mean local clustering over all nodes; nodes of degree < 2 count as 0.
    pub fn average_clustering(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        (0..n).map(|v| self.local_clustering(v)).sum::<f64>() / n as f64
    }

    /// Component label per node; labels are assigned in order of first node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Fraction of nodes in the largest connected component; zero for an empty graph.
    pub fn largest_component_fraction(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let labels = self.components();
        let mut sizes = vec![0usize; n];
        for l in labels {
            sizes[l] += 1;
        }
        *sizes.iter().max().unwrap() as f64 / n as f64
    }

    /// Unnormalized betweenness, each unordered pair counted once (Brandes).
    pub fn raw_betweenness(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut bc = vec![0.0; n];
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        let mut delta = vec![0.0f64; n];
        let mut queue = VecDeque::with_capacity(n);
        for s in 0..n {
            stack.clear();
            for v in 0..n {
                preds[v].clear();
                sigma[v] = 0.0;
                dist[v] = usize::MAX;
                delta[v] = 0.0;
            }
            sigma[s] = 1.0;
            dist[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                stack.push(v);
                for &w in &self.adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if dist[w] == dist[v] + 1 {
                        sigma[w] += sigma[v];
                        preds[w].push(v);
                    }
                }
            }
            while let Some(w) = stack.pop() {
                for &v in &preds[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
                if w != s {
                    bc[w] += delta[w];
                }
            }
        }
        // every pair was visited from both endpoints
        for b in &mut bc {
            *b /= 2.0;
        }
        bc
    }

    /// Betweenness divided by the `(n-1)(n-2)/2` pairs not involving the node.
    /// All zeros below three nodes.
    pub fn normalized_betweenness(&self) -> Vec<f64> {
        let n = self.node_count();
        if n < 3 {
            return vec![0.0; n];
        }
        let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
        self.raw_betweenness().into_iter().map(|b| b / pairs).collect()
    }

    /// Burt-style network constraint of `i` with unit edge weights.
    pub fn constraint(&self, i: usize, variant: ConstraintVariant) -> f64 {
        let di = self.degree(i);
        if di == 0 {
            return 0.0;
        }
        let pi = 1.0 / di as f64;
        let n = self.node_count();
        // indirect[j] = sum over k in N(i), k != j, of p_ik * p_kj
        let mut indirect = vec![0.0f64; n];
        for &k in &self.adj[i] {
            let pk = 1.0 / self.degree(k) as f64;
            for &j in &self.adj[k] {
                indirect[j] += pi * pk;
            }
        }
        let mut total = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let term = match variant {
                ConstraintVariant::StandardBurt => {
                    let direct = if self.has_edge(i, j) { pi } else { 0.0 };
                    direct + indirect[j]
                }
                ConstraintVariant::AsPrinted => indirect[j],
            };
            total += term * term;
        }
        total
    }
}

/// Which network-constraint formula to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintVariant {
    /// `Σ_j (p_ij + Σ_{k∉{i,j}} p_ik p_kj)²`
    #[default]
    StandardBurt,
    /// `Σ_j (Σ_{k≠j} p_ik p_kj)²`, i.e. without the direct term.
    AsPrinted,
}

impl FromStr for ConstraintVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "burt" | "standard-burt" => Ok(ConstraintVariant::StandardBurt),
            "as-printed" => Ok(ConstraintVariant::AsPrinted),
            other => Err(format!(
                "unknown constraint variant `{other}` (expected burt or as-printed)"
            )),
        }
    }
}

impl fmt::Display for ConstraintVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintVariant::StandardBurt => "burt",
            ConstraintVariant::AsPrinted => "as-printed",
        })
    }
}

/// The six projection metrics, in reporting order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Density,
    Clustering,
    Connectivity,
    MaxBetweenness,
    FocalBetweenness,
    FocalConstraint,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Density,
        Metric::Clustering,
        Metric::Connectivity,
        Metric::MaxBetweenness,
        Metric::FocalBetweenness,
        Metric::FocalConstraint,
    ];

    /// Density is fixed under degree-preserving randomization, so null-model
    /// comparisons only use these five.
    pub const NULL_MODEL: [Metric; 5] = [
        Metric::Clustering,
        Metric::Connectivity,
        Metric::MaxBetweenness,
        Metric::FocalBetweenness,
        Metric::FocalConstraint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Density => "density",
            Metric::Clustering => "clustering",
            Metric::Connectivity => "connectivity",
            Metric::MaxBetweenness => "max_betweenness",
            Metric::FocalBetweenness => "focal_betweenness",
            Metric::FocalConstraint => "focal_constraint",
        }
    }

    /// Whether values are confined to `[0, 1]`.
    pub fn is_unit_fraction(self) -> bool {
        self != Metric::FocalConstraint
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub density: f64,
    pub clustering: f64,
    pub connectivity: f64,
    pub max_betweenness: f64,
    pub focal_betweenness: f64,
    pub focal_constraint: f64,
}

impl MetricVector {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Density => self.density,
            Metric::Clustering => self.clustering,
            Metric::Connectivity => self.connectivity,
            Metric::MaxBetweenness => self.max_betweenness,
            Metric::FocalBetweenness => self.focal_betweenness,
            Metric::FocalConstraint => self.focal_constraint,
        }
    }
}

pub fn density(pair: &ProjectionPair) -> f64 {
    UndirectedView::gp(pair).density()
}

pub fn clustering(pair: &ProjectionPair) -> f64 {
    UndirectedView::gp(pair).average_clustering()
}

pub fn connectivity(pair: &ProjectionPair) -> f64 {
    UndirectedView::gp(pair).largest_component_fraction()
}

pub fn max_betweenness(pair: &ProjectionPair) -> f64 {
    max_of(&UndirectedView::gp(pair).normalized_betweenness())
}

pub fn focal_betweenness(pair: &ProjectionPair) -> f64 {
    UndirectedView::gp0(pair).normalized_betweenness()[pair.focal_index()]
}

pub fn focal_constraint(pair: &ProjectionPair, variant: ConstraintVariant) -> f64 {
    UndirectedView::gp0(pair).constraint(pair.focal_index(), variant)
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// All six metrics; each undirected view is built once.
pub fn metric_vector(pair: &ProjectionPair, variant: ConstraintVariant) -> MetricVector {
    let gp = UndirectedView::gp(pair);
    let gp0 = UndirectedView::gp0(pair);
    let f = pair.focal_index();
    MetricVector {
        density: gp.density(),
        clustering: gp.average_clustering(),
        connectivity: gp.largest_component_fraction(),
        max_betweenness: max_of(&gp.normalized_betweenness()),
        focal_betweenness: gp0.normalized_betweenness()[f],
        focal_constraint: gp0.constraint(f, variant),
    }
}
