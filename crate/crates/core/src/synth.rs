//! Synthetic projection graphs for the three prototypical citer classes, and
//! whole synthetic corpora built from them.
//!
//! Generator parameters are invented; they are tuned so that the classes are
//! clearly separated at 30 references:
//!
//! * idiosyncratic: every pair of references is linked independently with
//!   `edge_prob` (default 0.02).
//! * within-community: a core of `round(0.7·n)` references with topical
//!   locality. Core papers sit at random positions on a topic line and two of
//!   them are linked with probability `edge_prob^(d/5)`, `d` being their
//!   distance on the line. The remaining references are peripheral and link to
//!   each other and to every core paper with probability `edge_prob^8`; a
//!   peripheral paper with no core link gets one to a random core paper.
//!   `edge_prob = 1` gives a clique.
//! * brokerage: `cluster_count` clusters with intra-cluster probability
//!   `edge_prob`, joined only through `bridge_count` bridge papers. Each bridge
//!   links to one random member of every cluster.
//!
//! Edges always point from the lower to the higher local index, so generated
//! graphs are acyclic.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, GraphBuilder, PaperId, PaperMeta};
use crate::projection::ProjectionPair;
use crate::rng::{derive_seed, rng_from_seed};

pub const DEFAULT_N_CITED: usize = 30;

const CORE_FRACTION: f64 = 0.7;
const TOPIC_WIDTH: f64 = 5.0;
const PERIPHERY_EXPONENT: i32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrototypeKind {
    Idiosyncratic,
    WithinCommunity,
    Brokerage,
}

impl PrototypeKind {
    pub const ALL: [PrototypeKind; 3] = [
        PrototypeKind::Idiosyncratic,
        PrototypeKind::WithinCommunity,
        PrototypeKind::Brokerage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrototypeKind::Idiosyncratic => "idiosyncratic",
            PrototypeKind::WithinCommunity => "within-community",
            PrototypeKind::Brokerage => "brokerage",
        }
    }
}

impl fmt::Display for PrototypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrototypeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PrototypeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown prototype class `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrototypeSpec {
    pub kind: PrototypeKind,
    pub n_cited: usize,
    pub edge_prob: f64,
    pub cluster_count: usize,
    pub bridge_count: usize,
    pub seed: u64,
}

impl PrototypeSpec {
    pub fn with_defaults(kind: PrototypeKind, n_cited: usize, seed: u64) -> Self {
        let edge_prob = match kind {
            PrototypeKind::Idiosyncratic => 0.02,
            PrototypeKind::WithinCommunity | PrototypeKind::Brokerage => 0.4,
        };
        PrototypeSpec {
            kind,
            n_cited,
            edge_prob,
            cluster_count: 3,
            bridge_count: 2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cited < 1 {
            return Err(Error::InvalidSpec("n_cited must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return Err(Error::InvalidSpec(format!(
                "edge_prob {} outside [0, 1]",
                self.edge_prob
            )));
        }
        if self.kind == PrototypeKind::Brokerage {
            if self.cluster_count < 2 || self.bridge_count < 1 {
                return Err(Error::InvalidSpec(
                    "brokerage needs at least 2 clusters and 1 bridge".into(),
                ));
            }
            if self.n_cited < self.cluster_count + self.bridge_count {
                return Err(Error::InvalidSpec(format!(
                    "brokerage with {} clusters and {} bridges needs more than {} references",
                    self.cluster_count, self.bridge_count, self.n_cited
                )));
            }
        }
        Ok(())
    }
}

fn link(edges: &mut Vec<(usize, usize)>, a: usize, b: usize) {
    edges.push((a.min(b), a.max(b)));
}

/// Local-index edges of one prototype `G_p`, sorted and deduplicated.
pub fn prototype_edges(spec: &PrototypeSpec) -> Result<Vec<(usize, usize)>> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let n = spec.n_cited;
    let p = spec.edge_prob;
    let mut edges = Vec::new();
    match spec.kind {
        PrototypeKind::Idiosyncratic => {
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
        }
        PrototypeKind::WithinCommunity => within_community(&mut rng, n, p, &mut edges),
        PrototypeKind::Brokerage => {
            brokerage(&mut rng, n, p, spec.cluster_count, spec.bridge_count, &mut edges)
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

fn within_community(rng: &mut ChaCha8Rng, n: usize, p: f64, edges: &mut Vec<(usize, usize)>) {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let core_size = ((CORE_FRACTION * n as f64).round() as usize).clamp(1, n);
    let (core, periphery) = nodes.split_at(core_size);
    let mut topic: Vec<usize> = (0..core_size).collect();
    topic.shuffle(rng);
    for i in 0..core_size {
        for j in i + 1..core_size {
            let d = topic[i].abs_diff(topic[j]) as f64;
            if rng.gen_bool(p.powf(d / TOPIC_WIDTH)) {
                link(edges, core[i], core[j]);
            }
        }
    }
    let attach = p.powi(PERIPHERY_EXPONENT);
    for (i, &x) in periphery.iter().enumerate() {
        for &y in &periphery[i + 1..] {
            if rng.gen_bool(attach) {
                link(edges, x, y);
            }
        }
        let mut linked = false;
        for &c in core {
            if rng.gen_bool(attach) {
                link(edges, x, c);
                linked = true;
            }
        }
        if !linked {
            let c = core[rng.gen_range(0..core.len())];
            link(edges, x, c);
        }
    }
}

/// Cluster members take the first `n - bridges` indices in contiguous blocks;
/// bridges take the last indices.
fn brokerage(
    rng: &mut ChaCha8Rng,
    n: usize,
    p: f64,
    clusters: usize,
    bridges: usize,
    edges: &mut Vec<(usize, usize)>,
) {
    let members = n - bridges;
    let mut blocks = Vec::with_capacity(clusters);
    let mut start = 0;
    for c in 0..clusters {
        let size = members / clusters + usize::from(c < members % clusters);
        blocks.push(start..start + size);
        start += size;
    }
    for block in &blocks {
        for a in block.clone() {
            for b in a + 1..block.end {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
    }
    for bridge in members..n {
        for block in &blocks {
            let m = rng.gen_range(block.clone());
            link(edges, m, bridge);
        }
    }
}

/// Indices of the bridge papers in a brokerage prototype.
pub fn bridge_indices(spec: &PrototypeSpec) -> std::ops::Range<usize> {
    match spec.kind {
        PrototypeKind::Brokerage => spec.n_cited - spec.bridge_count..spec.n_cited,
        _ => 0..0,
    }
}

/// A standalone prototype projection with focal paper `v0` and references
/// `c0000, c0001, …`.
pub fn generate_prototype(spec: &PrototypeSpec) -> Result<ProjectionPair> {
    let edges = prototype_edges(spec)?;
    let cited = (0..spec.n_cited)
        .map(|i| PaperId::new(format!("c{i:04}")).expect("valid id"))
        .collect();
    ProjectionPair::new(PaperId::new("v0").expect("valid id"), cited, edges)
        .map_err(Error::InvalidSpec)
}

/// Relabels nodes in smallest-last (degeneracy) order. Orienting edges from
/// lower to higher label then bounds every out-degree by the degeneracy.
fn degeneracy_order(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut label = vec![0; n];
    for next in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("node left");
        removed[v] = true;
        label[v] = next;
        for &w in &adj[v] {
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }
    label
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    /// Number of focal papers per class, in [`PrototypeKind::ALL`] order.
    pub class_mix: [usize; 3],
    /// Inclusive range of focal publication years.
    pub years: (i32, i32),
    pub areas: Vec<String>,
    pub seed: u64,
    pub n_cited: usize,
    /// Classes pushed to the top and bottom of the citation ranking.
    pub forced_high: Option<PrototypeKind>,
    pub forced_low: Option<PrototypeKind>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            class_mix: [100, 100, 100],
            years: (1990, 2009),
            areas: vec!["CS".into(), "NS".into(), "SS".into()],
            seed: 0,
            n_cited: DEFAULT_N_CITED,
            forced_high: None,
            forced_low: None,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.class_mix.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidSpec("corpus needs at least one focal paper".into()));
        }
        if self.areas.is_empty() || self.areas.iter().any(|a| a.trim().is_empty() || a.contains(',')) {
            return Err(Error::InvalidSpec("areas must be non-empty labels without commas".into()));
        }
        if self.years.0 > self.years.1 {
            return Err(Error::InvalidSpec("year range is empty".into()));
        }
        PaperMeta::new(self.years.0, "x").map_err(Error::InvalidSpec)?;
        PaperMeta::new(self.years.1, "x").map_err(Error::InvalidSpec)?;
        if self.forced_high.is_some() && self.forced_high == self.forced_low {
            return Err(Error::InvalidSpec("forced high and low classes must differ".into()));
        }
        Ok(())
    }

    fn citation_range(&self, kind: PrototypeKind) -> std::ops::RangeInclusive<usize> {
        if self.forced_high.is_none() && self.forced_low.is_none() {
            0..=10
        } else if self.forced_high == Some(kind) {
            15..=25
        } else if self.forced_low == Some(kind) {
            0..=0
        } else {
            2..=8
        }
    }
}

/// A generated corpus with its ground-truth class labels.
#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub graph: CitationGraph,
    /// Focal papers and their class, sorted by id.
    pub labels: BTreeMap<PaperId, PrototypeKind>,
}

/// Maximum number of focal papers any single citing paper cites, which keeps
/// citing papers below the eligibility threshold.
const CITATIONS_PER_CITER: usize = 8;

/// Builds a corpus of focal papers `f00000…`, each with its own fresh reference
/// set `f00000r00…` realizing its class, and citing papers `k00000…` that give
/// focal papers their incoming citations. Only focal papers carry metadata, so
/// impact cohorts consist of focal papers alone.
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let mut rng = rng_from_seed(derive_seed(cfg.seed, "corpus", 0));
    let mut kinds: Vec<PrototypeKind> = PrototypeKind::ALL
        .iter()
        .zip(cfg.class_mix)
        .flat_map(|(&k, n)| std::iter::repeat_n(k, n))
        .collect();
    kinds.shuffle(&mut rng);

    let mut builder = GraphBuilder::new();
    let mut labels = BTreeMap::new();
    let mut citations = Vec::with_capacity(kinds.len());
    for (i, &kind) in kinds.iter().enumerate() {
        let focal = PaperId::new(format!("f{i:05}")).expect("valid id");
        let year = rng.gen_range(cfg.years.0..=cfg.years.1);
        let area = cfg.areas[rng.gen_range(0..cfg.areas.len())].clone();
        builder.add_paper(focal.clone(), PaperMeta::new(year, area).map_err(Error::InvalidSpec)?);

        let spec = PrototypeSpec::with_defaults(kind, cfg.n_cited, derive_seed(cfg.seed, focal.as_str(), 0));
        let edges = prototype_edges(&spec)?;
        let label = degeneracy_order(cfg.n_cited, &edges);
        let refs: Vec<PaperId> = (0..cfg.n_cited)
            .map(|r| PaperId::new(format!("{focal}r{r:02}")).expect("valid id"))
            .collect();
        for r in &refs {
            builder.add_edge(focal.clone(), r.clone());
        }
        for &(a, b) in &edges {
            let (la, lb) = (label[a], label[b]);
            builder.add_edge(refs[la.min(lb)].clone(), refs[la.max(lb)].clone());
        }
        citations.push((focal.clone(), rng.gen_range(cfg.citation_range(kind))));
        labels.insert(focal, kind);
    }

    let total: usize = citations.iter().map(|c| c.1).sum();
    let max_per_paper = citations.iter().map(|c| c.1).max().unwrap_or(0);
    let pool = total.div_ceil(CITATIONS_PER_CITER).max(max_per_paper).max(1);
    let mut next = 0;
    for (focal, count) in &citations {
        for _ in 0..*count {
            let citer = PaperId::new(format!("k{:05}", next % pool)).expect("valid id");
            builder.add_edge(citer, focal.clone());
            next += 1;
        }
    }
    let (graph, _) = builder.build();
    Ok(SynthCorpus { graph, labels })
}

impl SynthCorpus {
    pub fn write_labels_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "paper_id,class")?;
        for (id, kind) in &self.labels {
            writeln!(w, "{id},{kind}")?;
        }
        Ok(())
    }

    /// Writes `edges.tsv`, `meta.csv` and `labels.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<()> {
            let path = dir.join(name);
            let mut buf = Vec::new();
            f(&mut buf).map_err(|e| Error::io(&path, e))?;
            std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))
        };
        write("edges.tsv", &|b| self.graph.write_edges_tsv(b))?;
        write("meta.csv", &|b| self.graph.write_meta_csv(b))?;
        write("labels.csv", &|b| self.write_labels_csv(b))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{metric_vector, ConstraintVariant, UndirectedView};

    #[test]
    fn empty_idiosyncratic() {
        let spec = PrototypeSpec {
            edge_prob: 0.0,
            ..PrototypeSpec::with_defaults(PrototypeKind::Idiosyncratic, 30, 1)
        };
        let m = metric_vector(&generate_prototype(&spec).unwrap(), ConstraintVariant::StandardBurt);
        assert_eq!(m.density, 0.0);
        assert!((m.focal_betweenness - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_within_community_is_clique() {
        let spec = PrototypeSpec {
            edge_prob: 1.0,
            ..PrototypeSpec::with_defaults(PrototypeKind::WithinCommunity, 30, 9)
        };
        let m = metric_vector(&generate_prototype(&spec).unwrap(), ConstraintVariant::StandardBurt);
        assert!((m.density - 1.0).abs() < 1e-12);
        assert!((m.clustering - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = PrototypeSpec::with_defaults(PrototypeKind::Brokerage, 30, 0);
        assert!(PrototypeSpec { cluster_count: 1, ..base }.validate().is_err());
        assert!(PrototypeSpec { bridge_count: 0, ..base }.validate().is_err());
        assert!(PrototypeSpec { n_cited: 4, ..base }.validate().is_err());
        assert!(PrototypeSpec { n_cited: 0, ..base }.validate().is_err());
        assert!(PrototypeSpec { edge_prob: 1.5, ..base }.validate().is_err());
        assert!(generate_prototype(&PrototypeSpec { n_cited: 0, ..base }).is_err());
    }

    #[test]
    fn edges_point_forward() {
        for kind in PrototypeKind::ALL {
            for seed in 0..20 {
                let edges = prototype_edges(&PrototypeSpec::with_defaults(kind, 30, seed)).unwrap();
                assert!(edges.iter().all(|&(a, b)| a < b));
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        for kind in PrototypeKind::ALL {
            let spec = PrototypeSpec::with_defaults(kind, 30, 77);
            assert_eq!(prototype_edges(&spec).unwrap(), prototype_edges(&spec).unwrap());
        }
    }

    #[test]
    fn degeneracy_relabel_is_isomorphic() {
        let spec = PrototypeSpec::with_defaults(PrototypeKind::WithinCommunity, 30, 5);
        let edges = prototype_edges(&spec).unwrap();
        let label = degeneracy_order(30, &edges);
        let relabeled: Vec<_> = edges
            .iter()
            .map(|&(a, b)| (label[a].min(label[b]), label[a].max(label[b])))
            .collect();
        let before = UndirectedView::from_edges(30, &edges);
        let after = UndirectedView::from_edges(30, &relabeled);
        let mut d1: Vec<_> = (0..30).map(|v| before.degree(v)).collect();
        let mut d2: Vec<_> = (0..30).map(|v| after.degree(v)).collect();
        d1.sort_unstable();
        d2.sort_unstable();
        assert_eq!(d1, d2);
        assert_eq!(before.edge_count(), after.edge_count());
    }

    #[test]
    fn kind_round_trips_through_text() {
        for kind in PrototypeKind::ALL {
            assert_eq!(kind.name().parse::<PrototypeKind>().unwrap(), kind);
        }
    }
}
