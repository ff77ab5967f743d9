//! The citation network: loading, validation and focal-paper eligibility.
//!
//! An edge `(u, v)` means `u` cites `v`, so the out-neighbors of a paper are
//! its references. Nodes are indexed in ascending [`PaperId`] order, which makes
//! every traversal that walks indices deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_YEAR: i32 = 1800;
pub const MAX_YEAR: i32 = 2100;

/// Opaque paper identifier: non-empty, no whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PaperId(String);

impl PaperId {
    pub fn new(raw: impl Into<String>) -> Result<Self, String> {
        let raw = raw.into();
        if raw.is_empty() {
            return Err("empty paper id".to_string());
        }
        if raw.chars().any(char::is_whitespace) {
            return Err(format!("paper id `{raw}` contains whitespace"));
        }
        Ok(PaperId(raw))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for PaperId {
    type Error = String;

    fn try_from(value: String) -> Result<Self, String> {
        PaperId::new(value)
    }
}

impl From<PaperId> for String {
    fn from(id: PaperId) -> String {
        id.0
    }
}

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Publication year and discipline label. Together they form the impact cohort key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PaperMeta {
    pub year: i32,
    pub area: String,
}

impl PaperMeta {
    pub fn new(year: i32, area: impl Into<String>) -> Result<Self, String> {
        let area = area.into();
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            return Err(format!("year {year} outside [{MIN_YEAR}, {MAX_YEAR}]"));
        }
        if area.trim().is_empty() {
            return Err("empty area".to_string());
        }
        Ok(PaperMeta { year, area })
    }
}

/// Counters collected while building a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub edge_rows: usize,
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
    pub missing_meta_nodes: usize,
}

/// Accumulates papers and citations, then freezes them into a [`CitationGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    papers: BTreeMap<PaperId, Option<PaperMeta>>,
    edges: BTreeSet<(PaperId, PaperId)>,
    report: LoadReport,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a paper with metadata. Returns false if the paper already had metadata.
    pub fn add_paper(&mut self, id: PaperId, meta: PaperMeta) -> bool {
        let slot = self.papers.entry(id).or_insert(None);
        if slot.is_some() {
            return false;
        }
        *slot = Some(meta);
        true
    }

    pub fn add_edge(&mut self, citing: PaperId, cited: PaperId) {
        self.report.edge_rows += 1;
        if citing == cited {
            self.report.self_loops_dropped += 1;
            return;
        }
        self.papers.entry(citing.clone()).or_insert(None);
        self.papers.entry(cited.clone()).or_insert(None);
        if !self.edges.insert((citing, cited)) {
            self.report.duplicate_edges += 1;
        }
    }

    pub fn build(self) -> (CitationGraph, LoadReport) {
        let GraphBuilder {
            papers,
            edges,
            mut report,
        } = self;
        let n = papers.len();
        let mut ids = Vec::with_capacity(n);
        let mut meta = Vec::with_capacity(n);
        for (id, m) in papers {
            ids.push(id);
            meta.push(m);
        }
        let index: HashMap<PaperId, usize> =
            ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        // BTreeSet iteration is sorted by (citing, cited), so adjacency lists come out sorted.
        for (u, v) in &edges {
            let (u, v) = (index[u], index[v]);
            out[u].push(v);
            inc[v].push(u);
        }
        for list in &mut inc {
            list.sort_unstable();
        }
        report.missing_meta_nodes = meta.iter().filter(|m| m.is_none()).count();
        let graph = CitationGraph {
            ids,
            index,
            meta,
            out,
            inc,
            edge_count: edges.len(),
        };
        (graph, report)
    }
}

/// Immutable directed citation network with per-paper metadata.
#[derive(Clone, Debug)]
pub struct CitationGraph {
    ids: Vec<PaperId>,
    index: HashMap<PaperId, usize>,
    meta: Vec<Option<PaperMeta>>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    edge_count: usize,
}

impl CitationGraph {
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn id(&self, idx: usize) -> &PaperId {
        &self.ids[idx]
    }

    pub fn ids(&self) -> &[PaperId] {
        &self.ids
    }

    pub fn index_of(&self, id: &PaperId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &PaperId) -> bool {
        self.index.contains_key(id)
    }

    pub fn meta(&self, idx: usize) -> Option<&PaperMeta> {
        self.meta[idx].as_ref()
    }

    /// References of `idx`, ascending by index (and therefore by id).
    pub fn out_neighbors(&self, idx: usize) -> &[usize] {
        &self.out[idx]
    }

    pub fn in_neighbors(&self, idx: usize) -> &[usize] {
        &self.inc[idx]
    }

    pub fn out_degree(&self, idx: usize) -> usize {
        self.out[idx].len()
    }

    pub fn in_degree(&self, idx: usize) -> usize {
        self.inc[idx].len()
    }

    pub fn has_edge(&self, citing: usize, cited: usize) -> bool {
        self.out[citing].binary_search(&cited).is_ok()
    }

    /// All edges as index pairs, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Papers citing strictly more than `min_refs` others, sorted by id.
    pub fn eligible_focal_papers(&self, min_refs: usize) -> Vec<PaperId> {
        self.eligible_focal_indices(min_refs)
            .into_iter()
            .map(|i| self.ids[i].clone())
            .collect()
    }

    pub fn eligible_focal_indices(&self, min_refs: usize) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| self.out_degree(i) > min_refs)
            .collect()
    }

    /// Counts edges that lie on a directed cycle (both endpoints in the same
    /// strongly connected component) and samples up to 10 cycles.
    pub fn validate_acyclicity(&self) -> CycleReport {
        let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(self.node_count(), self.edge_count);
        for _ in 0..self.node_count() {
            pg.add_node(());
        }
        for (u, v) in self.edges() {
            pg.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
        }
        let mut component = vec![usize::MAX; self.node_count()];
        let mut nontrivial: Vec<Vec<usize>> = Vec::new();
        for scc in tarjan_scc(&pg) {
            if scc.len() < 2 {
                continue;
            }
            let mut members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
            members.sort_unstable();
            for &m in &members {
                component[m] = nontrivial.len();
            }
            nontrivial.push(members);
        }
        let cycle_edge_count = self
            .edges()
            .filter(|&(u, v)| component[u] != usize::MAX && component[u] == component[v])
            .count();

        nontrivial.sort_by_key(|members| members[0]);
        let sample_cycles = nontrivial
            .iter()
            .take(MAX_SAMPLE_CYCLES)
            .map(|members| {
                let cid = component[members[0]];
                self.cycle_through(members[0], |x| component[x] == cid)
                    .into_iter()
                    .map(|i| self.ids[i].clone())
                    .collect()
            })
            .collect();
        CycleReport {
            cycle_edge_count,
            sample_cycles,
        }
    }

    /// Shortest directed cycle through `start` restricted to nodes accepted by `inside`.
    fn cycle_through(&self, start: usize, inside: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.out[u] {
                if v == start {
                    let mut path = vec![u];
                    let mut cur = u;
                    while cur != start {
                        cur = parent[&cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return path;
                }
                if inside(v) && !parent.contains_key(&v) {
                    parent.insert(v, u);
                    queue.push_back(v);
                }
            }
        }
        Vec::new()
    }

    pub fn write_edges_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# citing_id\tcited_id")?;
        for (u, v) in self.edges() {
            writeln!(w, "{}\t{}", self.ids[u], self.ids[v])?;
        }
        Ok(())
    }

    /// Writes metadata rows for every paper that has metadata.
    pub fn write_meta_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "paper_id,year,area")?;
        for (id, meta) in self.ids.iter().zip(&self.meta) {
            if let Some(m) = meta {
                writeln!(w, "{},{},{}", id, m.year, m.area)?;
            }
        }
        Ok(())
    }
}

const MAX_SAMPLE_CYCLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle_edge_count: usize,
    pub sample_cycles: Vec<Vec<PaperId>>,
}

impl CycleReport {
    pub fn is_acyclic(&self) -> bool {
        self.cycle_edge_count == 0
    }
}

fn parse_error(source_name: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

/// Reads `citing<TAB>cited` rows. Blank lines and `#` comments are skipped.
pub fn read_edges<R: BufRead>(reader: R, builder: &mut GraphBuilder) -> Result<usize> {
    let mut rows = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| parse_error("edges", lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_error(
                "edges",
                lineno,
                format!("expected 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        let citing = PaperId::new(fields[0]).map_err(|m| parse_error("edges", lineno, m))?;
        let cited = PaperId::new(fields[1]).map_err(|m| parse_error("edges", lineno, m))?;
        builder.add_edge(citing, cited);
        rows += 1;
    }
    Ok(rows)
}

/// Reads a `paper_id,year,area` CSV with header.
pub fn read_meta<R: std::io::Read>(reader: R, builder: &mut GraphBuilder) -> Result<usize> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_error("meta", 1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["paper_id", "year", "area"] {
        return Err(parse_error(
            "meta",
            1,
            "expected header `paper_id,year,area`",
        ));
    }
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error("meta", line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(parse_error("meta", line, "expected 3 columns"));
        }
        let id = PaperId::new(&record[0]).map_err(|m| parse_error("meta", line, m))?;
        let year: i32 = record[1]
            .parse()
            .map_err(|_| parse_error("meta", line, format!("invalid year `{}`", &record[1])))?;
        let meta = PaperMeta::new(year, &record[2]).map_err(|m| parse_error("meta", line, m))?;
        if !builder.add_paper(id.clone(), meta) {
            return Err(parse_error(
                "meta",
                line,
                format!("duplicate metadata for `{id}`"),
            ));
        }
        rows += 1;
    }
    Ok(rows)
}

/// Builds a citation graph from an edge TSV stream and a metadata CSV stream.
pub fn load_citation_graph<E: BufRead, M: std::io::Read>(
    edges: E,
    meta: M,
) -> Result<(CitationGraph, LoadReport)> {
    let mut builder = GraphBuilder::new();
    read_meta(meta, &mut builder)?;
    if read_edges(edges, &mut builder)? == 0 {
        return Err(Error::EmptyEdgeSource);
    }
    Ok(builder.build())
}

pub fn load_citation_graph_from_paths(
    edges: &Path,
    meta: &Path,
) -> Result<(CitationGraph, LoadReport)> {
    let edge_file = std::fs::File::open(edges).map_err(|e| Error::io(edges, e))?;
    let meta_file = std::fs::File::open(meta).map_err(|e| Error::io(meta, e))?;
    load_citation_graph(std::io::BufReader::new(edge_file), meta_file)
}
