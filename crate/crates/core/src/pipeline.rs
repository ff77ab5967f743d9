//! End-to-end pipeline and the per-stage entry points used by the CLI.
//!
//! Every stage writes its artifacts under the output directory and wraps its
//! errors with the stage name.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::graph::{load_citation_graph_from_paths, CitationGraph, CycleReport, LoadReport, PaperId};
use crate::impact::{
    median_metric_by_impact, normalized_impact, stratify, CohortMode, ImpactBinning, ImpactRecord,
    StrataConfig,
};
use crate::metrics::{metric_vector, ConstraintVariant, MetricVector};
use crate::nullmodel::{compare_projection_pairs, ComparisonReport, NullModelConfig, DEFAULT_SWAP_FACTOR};
use crate::projection::{project, ProjectionPair};
use crate::report::{
    vectors_by_paper, write_curves_csv, write_file, write_histogram_set, write_impact_csv, write_json,
    write_metrics_csv, write_tests_csv,
};
use crate::stats::{group_means_table, temporal_split, GroupMeansTable, TemporalReport, DEFAULT_BINS};

pub const DEFAULT_MIN_REFS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub edges: PathBuf,
    pub meta: PathBuf,
    pub out: PathBuf,
    /// Focal papers need strictly more references than this.
    pub min_refs: usize,
    pub constraint: ConstraintVariant,
    pub strata: StrataConfig,
    pub cohort: CohortMode,
    pub seed: u64,
    pub swap_factor: usize,
    /// Randomized samples per focal paper; 0 skips the null model.
    pub samples: usize,
    pub bins: usize,
    /// Enables the old/recent comparison.
    pub cutoff_year: Option<i32>,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(edges: impl Into<PathBuf>, meta: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            edges: edges.into(),
            meta: meta.into(),
            out: out.into(),
            min_refs: DEFAULT_MIN_REFS,
            constraint: ConstraintVariant::StandardBurt,
            strata: StrataConfig::default(),
            cohort: CohortMode::Inclusive,
            seed: 0,
            swap_factor: DEFAULT_SWAP_FACTOR,
            samples: 1,
            bins: DEFAULT_BINS,
            cutoff_year: None,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for path in [&self.edges, &self.meta] {
            if !path.is_file() {
                return Err(Error::io(
                    path.as_path(),
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
                ));
            }
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        StrataConfig::new(self.strata.high_fraction(), self.strata.low_fraction())?;
        Ok(())
    }

    fn null_model(&self) -> NullModelConfig {
        NullModelConfig {
            samples_per_paper: self.samples,
            seed: self.seed,
            swap_factor: self.swap_factor,
            constraint: self.constraint,
            bins: self.bins,
        }
    }

    /// Runs `f` on a pool of `jobs` threads, or on the global pool.
    pub fn with_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.jobs {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }

    fn prepare_out(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        Ok(&self.out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub nodes: usize,
    pub edges: usize,
    pub load: LoadReport,
    pub cycles: CycleReport,
    pub eligible_focal_papers: usize,
    pub min_refs: usize,
}

/// One metric row per eligible focal paper, in id order.
pub type MetricRows = Vec<(PaperId, usize, MetricVector)>;

pub fn load(cfg: &RunConfig) -> Result<(CitationGraph, LoadReport)> {
    cfg.validate().stage("ingest")?;
    load_citation_graph_from_paths(&cfg.edges, &cfg.meta).stage("ingest")
}

pub fn ingest_summary(g: &CitationGraph, load: LoadReport, min_refs: usize) -> IngestSummary {
    IngestSummary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        load,
        cycles: g.validate_acyclicity(),
        eligible_focal_papers: g.eligible_focal_indices(min_refs).len(),
        min_refs,
    }
}

pub fn eligible_projections(g: &CitationGraph, min_refs: usize) -> Result<Vec<ProjectionPair>> {
    let focal = g.eligible_focal_papers(min_refs);
    if focal.is_empty() {
        return Err(Error::EmptyFocalSet).stage("eligibility");
    }
    focal
        .iter()
        .map(|id| project(g, id))
        .collect::<Result<_>>()
        .stage("projection")
}

pub fn metric_rows(pairs: &[ProjectionPair], variant: ConstraintVariant) -> MetricRows {
    pairs
        .par_iter()
        .map(|p| (p.focal().clone(), p.n_cited(), metric_vector(p, variant)))
        .collect()
}

/// Impact for every paper with metadata; strata are assigned among the papers
/// in `focal` only, everything else stays unassigned.
pub fn impact_records(
    g: &CitationGraph,
    cohort: CohortMode,
    strata: &StrataConfig,
    focal: &BTreeMap<PaperId, MetricVector>,
) -> Vec<ImpactRecord> {
    let mut records = normalized_impact(g, cohort).records;
    let idx: Vec<usize> = (0..records.len())
        .filter(|&i| focal.contains_key(&records[i].paper))
        .collect();
    let subset: Vec<ImpactRecord> = idx.iter().map(|&i| records[i].clone()).collect();
    for (i, r) in idx.into_iter().zip(stratify(&subset, strata)) {
        records[i] = r;
    }
    records
}

fn focal_records(records: &[ImpactRecord], vectors: &BTreeMap<PaperId, MetricVector>) -> Vec<ImpactRecord> {
    records
        .iter()
        .filter(|r| vectors.contains_key(&r.paper))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub ingest: IngestSummary,
    pub constraint: ConstraintVariant,
    pub strata: StrataConfig,
    pub cohort: CohortMode,
    pub seed: u64,
    pub swap_factor: usize,
    pub samples: usize,
    pub bins: usize,
    pub table1: GroupMeansTable,
    pub nullmodel: Option<ComparisonReport>,
    pub temporal: Option<TemporalReport>,
}

/// `ingest` subcommand: normalized copies of the inputs plus `ingest.json`.
pub fn run_ingest(cfg: &RunConfig) -> Result<IngestSummary> {
    let (g, load) = load(cfg)?;
    let out = cfg.prepare_out().stage("ingest")?;
    let summary = ingest_summary(&g, load, cfg.min_refs);
    (|| {
        write_file(&out.join("edges.tsv"), |b| g.write_edges_tsv(b))?;
        write_file(&out.join("meta.csv"), |b| g.write_meta_csv(b))?;
        write_json(&out.join("ingest.json"), &summary)
    })()
    .stage("ingest")?;
    Ok(summary)
}

/// `metrics` subcommand: `metrics.csv`.
pub fn run_metrics(cfg: &RunConfig) -> Result<MetricRows> {
    let (g, _) = load(cfg)?;
    let pairs = eligible_projections(&g, cfg.min_refs)?;
    let rows = cfg.with_pool(|| metric_rows(&pairs, cfg.constraint)).stage("metrics")?;
    let out = cfg.prepare_out().stage("metrics")?;
    write_file(&out.join("metrics.csv"), |b| write_metrics_csv(b, &rows)).stage("metrics")?;
    Ok(rows)
}

/// `nullmodel` subcommand: `nullmodel.json`, `nullmodel_tests.csv` and `fig3_<metric>.csv`.
pub fn run_nullmodel(cfg: &RunConfig) -> Result<ComparisonReport> {
    let (g, _) = load(cfg)?;
    let pairs = eligible_projections(&g, cfg.min_refs)?;
    let report = nullmodel_stage(cfg, &pairs)?;
    let out = cfg.prepare_out().stage("nullmodel")?;
    write_json(&out.join("nullmodel.json"), &report).stage("nullmodel")?;
    Ok(report)
}

fn nullmodel_stage(cfg: &RunConfig, pairs: &[ProjectionPair]) -> Result<ComparisonReport> {
    let null_cfg = NullModelConfig {
        samples_per_paper: cfg.samples.max(1),
        ..cfg.null_model()
    };
    let report = cfg
        .with_pool(|| compare_projection_pairs(pairs, &null_cfg))
        .and_then(|r| r)
        .stage("nullmodel")?;
    let out = cfg.prepare_out().stage("nullmodel")?;
    (|| {
        write_histogram_set(out, "fig3", &report.metrics, "real", "random")?;
        write_file(&out.join("nullmodel_tests.csv"), |b| {
            write_tests_csv(b, &report.metrics, "real", "random")
        })
    })()
    .stage("nullmodel")?;
    Ok(report)
}

/// `impact` subcommand: `impact.csv`.
pub fn run_impact(cfg: &RunConfig) -> Result<Vec<ImpactRecord>> {
    let (g, _) = load(cfg)?;
    let pairs = eligible_projections(&g, cfg.min_refs)?;
    let vectors: BTreeMap<PaperId, MetricVector> = pairs
        .iter()
        .map(|p| (p.focal().clone(), MetricVector::default()))
        .collect();
    let records = impact_records(&g, cfg.cohort, &cfg.strata, &vectors);
    let out = cfg.prepare_out().stage("impact")?;
    write_file(&out.join("impact.csv"), |b| write_impact_csv(b, &records)).stage("impact")?;
    Ok(records)
}

/// `temporal` subcommand: `temporal.json`, `temporal_tests.csv` and `fig5_<metric>.csv`.
pub fn run_temporal(cfg: &RunConfig) -> Result<TemporalReport> {
    let cutoff = cfg
        .cutoff_year
        .ok_or_else(|| Error::Config("temporal split needs a cutoff year".into()))
        .stage("temporal")?;
    let (g, _) = load(cfg)?;
    let pairs = eligible_projections(&g, cfg.min_refs)?;
    let rows = cfg.with_pool(|| metric_rows(&pairs, cfg.constraint)).stage("metrics")?;
    let vectors = vectors_by_paper(&rows);
    let records = impact_records(&g, cfg.cohort, &cfg.strata, &vectors);
    let report = temporal_stage(cfg, cutoff, &records, &vectors)?;
    write_json(&cfg.out.join("temporal.json"), &report).stage("temporal")?;
    Ok(report)
}

fn temporal_stage(
    cfg: &RunConfig,
    cutoff: i32,
    records: &[ImpactRecord],
    vectors: &BTreeMap<PaperId, MetricVector>,
) -> Result<TemporalReport> {
    let report = temporal_split(records, vectors, cutoff, cfg.bins).stage("temporal")?;
    let out = cfg.prepare_out().stage("temporal")?;
    (|| {
        write_histogram_set(out, "fig5", &report.metrics, "old", "recent")?;
        write_file(&out.join("temporal_tests.csv"), |b| {
            write_tests_csv(b, &report.metrics, "old", "recent")
        })
    })()
    .stage("temporal")?;
    Ok(report)
}

/// Full pipeline (`report` subcommand). Writes `metrics.csv`, `impact.csv`,
/// `table1.csv`, `fig4_curves.csv`, the null-model artifacts unless
/// `samples == 0`, the temporal artifacts when a cutoff is set, and
/// `report.json`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineReport> {
    let (g, load) = load(cfg)?;
    let ingest = ingest_summary(&g, load, cfg.min_refs);
    let out = cfg.prepare_out().stage("ingest")?;

    let pairs = eligible_projections(&g, cfg.min_refs)?;
    let rows = cfg.with_pool(|| metric_rows(&pairs, cfg.constraint)).stage("metrics")?;
    write_file(&out.join("metrics.csv"), |b| write_metrics_csv(b, &rows)).stage("metrics")?;
    let vectors = vectors_by_paper(&rows);

    let records = impact_records(&g, cfg.cohort, &cfg.strata, &vectors);
    write_file(&out.join("impact.csv"), |b| write_impact_csv(b, &records)).stage("impact")?;

    let focal = focal_records(&records, &vectors);
    let table1 = group_means_table(&vectors, &focal);
    let curves = median_metric_by_impact(&focal, &vectors, ImpactBinning::default());
    (|| {
        write_file(&out.join("table1.csv"), |b| table1.write_csv(b))?;
        write_file(&out.join("fig4_curves.csv"), |b| write_curves_csv(b, &curves))
    })()
    .stage("report")?;

    let nullmodel = if cfg.samples > 0 {
        Some(nullmodel_stage(cfg, &pairs)?)
    } else {
        None
    };
    let temporal = match cfg.cutoff_year {
        Some(cutoff) => Some(temporal_stage(cfg, cutoff, &focal, &vectors)?),
        None => None,
    };

    let report = PipelineReport {
        ingest,
        constraint: cfg.constraint,
        strata: cfg.strata,
        cohort: cfg.cohort,
        seed: cfg.seed,
        swap_factor: cfg.swap_factor,
        samples: cfg.samples,
        bins: cfg.bins,
        table1,
        nullmodel,
        temporal,
    };
    write_json(&out.join("report.json"), &report).stage("report")?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_meta_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("edges.tsv");
        std::fs::write(&edges, "a\tb\n").unwrap();
        let cfg = RunConfig::new(&edges, dir.path().join("nope.csv"), dir.path().join("out"));
        let err = run_pipeline(&cfg).unwrap_err().to_string();
        assert!(err.starts_with("ingest: "), "{err}");
        assert!(err.contains("nope.csv"), "{err}");
    }

    #[test]
    fn no_eligible_papers_is_stage_error() {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("edges.tsv");
        let meta = dir.path().join("meta.csv");
        std::fs::write(&edges, "a\tb\n").unwrap();
        std::fs::write(&meta, "paper_id,year,area\na,2000,CS\n").unwrap();
        let cfg = RunConfig::new(&edges, &meta, dir.path().join("out"));
        let err = run_pipeline(&cfg).unwrap_err().to_string();
        assert!(err.starts_with("eligibility: "), "{err}");
    }
}
