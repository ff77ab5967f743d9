//! Year/area-normalized impact and impact strata.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, PaperId};
use crate::metrics::{Metric, MetricVector};
use crate::stats::median;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    High,
    Mid,
    Low,
    Unassigned,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stratum::High => "high",
            Stratum::Mid => "mid",
            Stratum::Low => "low",
            Stratum::Unassigned => "unassigned",
        })
    }
}

impl FromStr for Stratum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "high" => Ok(Stratum::High),
            "mid" => Ok(Stratum::Mid),
            "low" => Ok(Stratum::Low),
            "unassigned" => Ok(Stratum::Unassigned),
            other => Err(format!("unknown stratum `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpactRecord {
    pub paper: PaperId,
    pub year: i32,
    pub area: String,
    pub raw_citations: usize,
    pub cohort_mean: f64,
    pub impact: f64,
    pub stratum: Stratum,
}

impl ImpactRecord {
    /// Only papers whose cohort has a positive mean can be ranked into strata.
    pub fn is_rankable(&self) -> bool {
        self.cohort_mean > 0.0
    }
}

/// Whether a paper counts toward its own cohort mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CohortMode {
    #[default]
    Inclusive,
    Exclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrataConfig {
    high_fraction: f64,
    low_fraction: f64,
}

impl Default for StrataConfig {
    fn default() -> Self {
        StrataConfig {
            high_fraction: 0.10,
            low_fraction: 0.25,
        }
    }
}

impl StrataConfig {
    pub fn new(high_fraction: f64, low_fraction: f64) -> Result<Self> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(high_fraction) || !unit(low_fraction) || high_fraction + low_fraction >= 1.0 {
            return Err(Error::Config(format!(
                "strata fractions high={high_fraction} low={low_fraction} must lie in [0,1] and sum below 1"
            )));
        }
        Ok(StrataConfig {
            high_fraction,
            low_fraction,
        })
    }

    pub fn high_fraction(&self) -> f64 {
        self.high_fraction
    }

    pub fn low_fraction(&self) -> f64 {
        self.low_fraction
    }
}

/// Within-dataset citation count (in-degree) of every paper.
pub fn citation_counts(g: &CitationGraph) -> BTreeMap<PaperId, usize> {
    (0..g.node_count())
        .map(|i| (g.id(i).clone(), g.in_degree(i)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpactTable {
    /// Sorted by paper id; all strata start out `Unassigned`.
    pub records: Vec<ImpactRecord>,
    /// Papers skipped because they carry no year/area.
    pub missing_meta: usize,
}

/// Citation count divided by the mean count of the paper's (year, area) cohort.
/// Papers whose cohort mean is zero get impact 0.
pub fn normalized_impact(g: &CitationGraph, mode: CohortMode) -> ImpactTable {
    let mut cohorts: HashMap<(i32, &str), (usize, usize)> = HashMap::new();
    let mut missing_meta = 0;
    for i in 0..g.node_count() {
        match g.meta(i) {
            Some(m) => {
                let entry = cohorts.entry((m.year, m.area.as_str())).or_default();
                entry.0 += 1;
                entry.1 += g.in_degree(i);
            }
            None => missing_meta += 1,
        }
    }
    let mut records = Vec::with_capacity(g.node_count() - missing_meta);
    for i in 0..g.node_count() {
        let Some(m) = g.meta(i) else { continue };
        let (size, total) = cohorts[&(m.year, m.area.as_str())];
        let c = g.in_degree(i);
        let cohort_mean = match mode {
            CohortMode::Inclusive => total as f64 / size as f64,
            CohortMode::Exclusive if size > 1 => (total - c) as f64 / (size - 1) as f64,
            CohortMode::Exclusive => 0.0,
        };
        let impact = if cohort_mean > 0.0 {
            c as f64 / cohort_mean
        } else {
            0.0
        };
        records.push(ImpactRecord {
            paper: g.id(i).clone(),
            year: m.year,
            area: m.area.clone(),
            raw_citations: c,
            cohort_mean,
            impact,
            stratum: Stratum::Unassigned,
        });
    }
    ImpactTable {
        records,
        missing_meta,
    }
}

/// Assigns High/Mid/Low within each area by nearest rank.
///
/// With `n` rankable records in an area, the top `ceil(high·n)` by impact are
/// High and the bottom `ceil(low·n)` of the rest are Low. Ties order by paper
/// id, lower ids ranking higher. Records from zero-mean cohorts stay Unassigned.
/// Output order matches input order.
pub fn stratify(records: &[ImpactRecord], cfg: &StrataConfig) -> Vec<ImpactRecord> {
    let mut out = records.to_vec();
    let mut by_area: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        out[i].stratum = Stratum::Unassigned;
        if r.is_rankable() {
            by_area.entry(r.area.as_str()).or_default().push(i);
        }
    }
    for idxs in by_area.into_values() {
        let mut ranked = idxs;
        ranked.sort_by(|&a, &b| {
            records[b]
                .impact
                .total_cmp(&records[a].impact)
                .then_with(|| records[a].paper.cmp(&records[b].paper))
        });
        let n = ranked.len();
        let high = ((cfg.high_fraction * n as f64).ceil() as usize).min(n);
        let low = ((cfg.low_fraction * n as f64).ceil() as usize).min(n - high);
        for (rank, &i) in ranked.iter().enumerate() {
            out[i].stratum = if rank < high {
                Stratum::High
            } else if rank >= n - low {
                Stratum::Low
            } else {
                Stratum::Mid
            };
        }
    }
    out
}

/// Impact bins for median curves: `floor(I)` capped at `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactBinning {
    pub cap: u32,
}

impl Default for ImpactBinning {
    fn default() -> Self {
        ImpactBinning { cap: 20 }
    }
}

impl ImpactBinning {
    pub fn bin(&self, impact: f64) -> u32 {
        (impact.max(0.0).floor() as u32).min(self.cap)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub area: String,
    pub bin: u32,
    pub count: usize,
    /// Median per metric, in [`Metric::ALL`] order.
    pub medians: [f64; 6],
}

/// Median metric value per (area, impact bin). Records without a vector are skipped.
pub fn median_metric_by_impact(
    records: &[ImpactRecord],
    vectors: &BTreeMap<PaperId, MetricVector>,
    binning: ImpactBinning,
) -> Vec<CurveRow> {
    let mut groups: BTreeMap<(&str, u32), Vec<&MetricVector>> = BTreeMap::new();
    for r in records {
        if let Some(v) = vectors.get(&r.paper) {
            groups
                .entry((r.area.as_str(), binning.bin(r.impact)))
                .or_default()
                .push(v);
        }
    }
    groups
        .into_iter()
        .map(|((area, bin), vs)| {
            let mut medians = [0.0; 6];
            for (slot, metric) in medians.iter_mut().zip(Metric::ALL) {
                let values: Vec<f64> = vs.iter().map(|v| v.get(metric)).collect();
                *slot = median(&values).unwrap_or(f64::NAN);
            }
            CurveRow {
                area: area.to_string(),
                bin,
                count: vs.len(),
                medians,
            }
        })
        .collect()
}
