//! Citation projection graphs of a focal paper.
//!
//! `G_p` is the subgraph induced by the papers the focal paper cites. `G_p0`
//! adds the focal paper and its outgoing citations. Edges are stored with local
//! indices: cited papers occupy `0..n_cited` in id order and the focal paper is
//! `n_cited`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, PaperId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionPair {
    focal: PaperId,
    cited: Vec<PaperId>,
    gp_edges: Vec<(usize, usize)>,
}

impl ProjectionPair {
    /// Assembles a pair from local-index edges. Edges are sorted and deduplicated;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn new(
        focal: PaperId,
        cited: Vec<PaperId>,
        mut gp_edges: Vec<(usize, usize)>,
    ) -> Result<Self, String> {
        let n = cited.len();
        if let Some(&(u, v)) = gp_edges.iter().find(|&&(u, v)| u >= n || v >= n || u == v) {
            return Err(format!("invalid projection edge ({u}, {v}) for {n} cited papers"));
        }
        if cited.contains(&focal) {
            return Err(format!("focal paper `{focal}` appears among its references"));
        }
        gp_edges.sort_unstable();
        gp_edges.dedup();
        Ok(ProjectionPair {
            focal,
            cited,
            gp_edges,
        })
    }

    pub fn focal(&self) -> &PaperId {
        &self.focal
    }

    pub fn cited(&self) -> &[PaperId] {
        &self.cited
    }

    pub fn n_cited(&self) -> usize {
        self.cited.len()
    }

    /// Local index of the focal paper inside `G_p0`.
    pub fn focal_index(&self) -> usize {
        self.cited.len()
    }

    pub fn gp_edges(&self) -> &[(usize, usize)] {
        &self.gp_edges
    }

    /// `G_p` edges followed by the focal paper's citations `(focal, c)`.
    pub fn gp0_edges(&self) -> Vec<(usize, usize)> {
        let f = self.focal_index();
        let mut edges = self.gp_edges.clone();
        edges.extend((0..self.cited.len()).map(|c| (f, c)));
        edges
    }

    /// Same projection with `G_p` replaced by `edges` (over the same cited set).
    pub fn with_gp_edges(&self, edges: Vec<(usize, usize)>) -> Result<Self, String> {
        ProjectionPair::new(self.focal.clone(), self.cited.clone(), edges)
    }

    fn local_id(&self, i: usize) -> &PaperId {
        if i == self.focal_index() {
            &self.focal
        } else {
            &self.cited[i]
        }
    }

    /// TSV with a `# gp` section followed by a `# gp0` section.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# gp")?;
        for &(u, v) in &self.gp_edges {
            writeln!(w, "{}\t{}", self.local_id(u), self.local_id(v))?;
        }
        writeln!(w, "# gp0")?;
        for (u, v) in self.gp0_edges() {
            writeln!(w, "{}\t{}", self.local_id(u), self.local_id(v))?;
        }
        Ok(())
    }
}

/// Extracts the projection pair of `focal` from the citation network.
pub fn project(g: &CitationGraph, focal: &PaperId) -> Result<ProjectionPair> {
    let idx = g
        .index_of(focal)
        .ok_or_else(|| Error::PaperNotFound(focal.clone()))?;
    Ok(project_index(g, idx))
}

pub(crate) fn project_index(g: &CitationGraph, focal: usize) -> ProjectionPair {
    let refs = g.out_neighbors(focal);
    // refs is sorted by global index, so binary search gives the local index.
    let mut gp_edges = Vec::new();
    for (lu, &u) in refs.iter().enumerate() {
        for &v in g.out_neighbors(u) {
            if let Ok(lv) = refs.binary_search(&v) {
                gp_edges.push((lu, lv));
            }
        }
    }
    ProjectionPair {
        focal: g.id(focal).clone(),
        cited: refs.iter().map(|&r| g.id(r).clone()).collect(),
        gp_edges,
    }
}
