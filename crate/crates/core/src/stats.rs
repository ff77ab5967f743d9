//! Histograms, Welch t-tests, impact-stratum tables and old/recent comparisons.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::graph::PaperId;
use crate::impact::{ImpactRecord, Stratum};
use crate::metrics::{Metric, MetricVector};

pub const DEFAULT_BINS: usize = 20;

/// Smallest p-value printed numerically; anything below is shown as `< 2.2e-16`.
pub const P_VALUE_FLOOR: f64 = 2.2e-16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub sample_count: usize,
    /// Values outside the range that were pushed into an end bin.
    pub clamped: usize,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.masses.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Equal-width histogram over `[lo, hi]`, normalized to unit mass.
///
/// A value on an interior edge belongs to the higher bin; `hi` itself belongs
/// to the last bin.
pub fn normalized_histogram(values: &[f64], bin_count: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if bin_count == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Config(format!("invalid histogram range [{lo}, {hi}]")));
    }
    let width = hi - lo;
    let bin_edges: Vec<f64> = (0..=bin_count)
        .map(|k| {
            if k == bin_count {
                hi
            } else {
                lo + width * k as f64 / bin_count as f64
            }
        })
        .collect();
    let mut counts = vec![0usize; bin_count];
    let mut clamped = 0;
    for &v in values {
        let idx = if v < lo {
            clamped += 1;
            0
        } else if v > hi {
            clamped += 1;
            bin_count - 1
        } else {
            let mut idx = (((v - lo) / width) * bin_count as f64).floor() as usize;
            idx = idx.min(bin_count - 1);
            // floating-point guard so the edge rule holds exactly
            while idx + 1 < bin_count && v >= bin_edges[idx + 1] {
                idx += 1;
            }
            while idx > 0 && v < bin_edges[idx] {
                idx -= 1;
            }
            idx
        };
        counts[idx] += 1;
    }
    let n = values.len();
    let masses = counts
        .iter()
        .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
        .collect();
    Ok(Histogram {
        bin_edges,
        masses,
        sample_count: n,
        clamped,
    })
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    /// Two-sided.
    pub p_value: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Two-sided Welch unequal-variance t-test.
///
/// When both samples have zero variance the test degenerates: equal means give
/// `t = 0, p = 1`, different means give an infinite statistic and `p = 0`.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    let (n_a, n_b) = (a.len(), b.len());
    if n_a < 2 || n_b < 2 {
        return Err(Error::InsufficientSamples { n_a, n_b });
    }
    let (mean_a, mean_b) = (mean(a), mean(b));
    let se_a = sample_variance(a) / n_a as f64;
    let se_b = sample_variance(b) / n_b as f64;
    let se2 = se_a + se_b;
    if se2 == 0.0 {
        let diff = mean_a - mean_b;
        let (t, p) = if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, 0.0)
        };
        return Ok(TTestResult {
            t_statistic: t,
            degrees_of_freedom: (n_a + n_b - 2) as f64,
            p_value: p,
            mean_a,
            mean_b,
            n_a,
            n_b,
        });
    }
    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (se_a * se_a / (n_a - 1) as f64 + se_b * se_b / (n_b - 1) as f64);
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: student_t_two_sided_p(t, df),
        mean_a,
        mean_b,
        n_a,
        n_b,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom, via the
/// regularized incomplete beta function.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Formats a p-value the way result tables print it.
pub fn format_p_value(p: f64) -> String {
    if p < P_VALUE_FLOOR {
        return "< 2.2e-16".to_string();
    }
    if p >= 0.001 {
        return format!("{p:.3}");
    }
    let formatted = format!("{p:.2e}");
    // pad the exponent to two digits: 9.44e-8 -> 9.44e-08
    match formatted.split_once("e-") {
        Some((mantissa, exp)) if exp.len() == 1 => format!("{mantissa}e-0{exp}"),
        _ => formatted,
    }
}

/// Histogram range for a metric given the values that will be binned.
pub fn metric_range(metric: Metric, values: &[f64]) -> (f64, f64) {
    if metric.is_unit_fraction() {
        return (0.0, 1.0);
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        (0.0, max)
    } else {
        (0.0, 1.0)
    }
}

/// Paired histograms and a Welch test for one metric across two samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: Metric,
    pub histogram_a: Histogram,
    pub histogram_b: Histogram,
    pub t_test: Option<TTestResult>,
    /// Why `t_test` is missing, if it is.
    pub t_test_error: Option<String>,
}

pub fn compare_samples(metric: Metric, a: &[f64], b: &[f64], bins: usize) -> Result<MetricComparison> {
    let all: Vec<f64> = a.iter().chain(b).copied().collect();
    let (lo, hi) = metric_range(metric, &all);
    let (t_test, t_test_error) = match welch_t_test(a, b) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(MetricComparison {
        metric,
        histogram_a: normalized_histogram(a, bins, lo, hi)?,
        histogram_b: normalized_histogram(b, bins, lo, hi)?,
        t_test,
        t_test_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMeansRow {
    pub metric: Metric,
    pub area: String,
    pub available: bool,
    pub mean_high: Option<f64>,
    pub mean_mid: Option<f64>,
    pub mean_low: Option<f64>,
    pub high_vs_mid: Option<TTestResult>,
    pub mid_vs_low: Option<TTestResult>,
    pub high_vs_low: Option<TTestResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMeansTable {
    pub rows: Vec<GroupMeansRow>,
}

impl GroupMeansTable {
    pub fn row(&self, metric: Metric, area: &str) -> Option<&GroupMeansRow> {
        self.rows.iter().find(|r| r.metric == metric && r.area == area)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "feature,area,high,mid,low,p_high_mid,p_mid_low,p_high_low")?;
        let num = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), crate::report::fmt_sig6);
        let p = |t: &Option<TTestResult>| {
            t.as_ref()
                .map_or_else(|| "NA".to_string(), |t| format_p_value(t.p_value))
        };
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.metric,
                r.area,
                num(r.mean_high),
                num(r.mean_mid),
                num(r.mean_low),
                p(&r.high_vs_mid),
                p(&r.mid_vs_low),
                p(&r.high_vs_low)
            )?;
        }
        Ok(())
    }
}

/// Per-area, per-metric stratum means with the three pairwise Welch tests.
///
/// Rows are ordered by metric, then area. An area missing any stratum yields
/// rows marked unavailable.
pub fn group_means_table(
    vectors: &BTreeMap<PaperId, MetricVector>,
    records: &[ImpactRecord],
) -> GroupMeansTable {
    let mut groups: BTreeMap<&str, [Vec<&MetricVector>; 3]> = BTreeMap::new();
    for r in records {
        let slot = match r.stratum {
            Stratum::High => 0,
            Stratum::Mid => 1,
            Stratum::Low => 2,
            Stratum::Unassigned => continue,
        };
        let Some(v) = vectors.get(&r.paper) else {
            continue;
        };
        groups.entry(r.area.as_str()).or_default()[slot].push(v);
    }
    let mut rows = Vec::with_capacity(Metric::ALL.len() * groups.len());
    for metric in Metric::ALL {
        for (area, strata) in &groups {
            let values: Vec<Vec<f64>> = strata
                .iter()
                .map(|vs| vs.iter().map(|v| v.get(metric)).collect())
                .collect();
            let available = values.iter().all(|v| !v.is_empty());
            let row = if available {
                let m = |i: usize| Some(mean(&values[i]));
                let t = |i: usize, j: usize| welch_t_test(&values[i], &values[j]).ok();
                GroupMeansRow {
                    metric,
                    area: area.to_string(),
                    available,
                    mean_high: m(0),
                    mean_mid: m(1),
                    mean_low: m(2),
                    high_vs_mid: t(0, 1),
                    mid_vs_low: t(1, 2),
                    high_vs_low: t(0, 2),
                }
            } else {
                GroupMeansRow {
                    metric,
                    area: area.to_string(),
                    available,
                    mean_high: None,
                    mean_mid: None,
                    mean_low: None,
                    high_vs_mid: None,
                    mid_vs_low: None,
                    high_vs_low: None,
                }
            };
            rows.push(row);
        }
    }
    GroupMeansTable { rows }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalReport {
    pub cutoff_year: i32,
    pub n_old: usize,
    pub n_recent: usize,
    /// `histogram_a`/`mean_a` are the old group (year <= cutoff).
    pub metrics: Vec<MetricComparison>,
}

/// Splits papers with metric vectors into `year <= cutoff` and `year > cutoff`.
pub fn temporal_split(
    records: &[ImpactRecord],
    vectors: &BTreeMap<PaperId, MetricVector>,
    cutoff_year: i32,
    bins: usize,
) -> Result<TemporalReport> {
    let mut old = Vec::new();
    let mut recent = Vec::new();
    let mut seen = BTreeSet::new();
    for r in records {
        let Some(v) = vectors.get(&r.paper) else {
            continue;
        };
        if !seen.insert(&r.paper) {
            continue;
        }
        if r.year <= cutoff_year {
            old.push(v);
        } else {
            recent.push(v);
        }
    }
    if old.is_empty() {
        return Err(Error::EmptyTemporalSide {
            cutoff: cutoff_year,
            side: "old",
        });
    }
    if recent.is_empty() {
        return Err(Error::EmptyTemporalSide {
            cutoff: cutoff_year,
            side: "recent",
        });
    }
    let metrics = Metric::ALL
        .iter()
        .map(|&m| {
            let a: Vec<f64> = old.iter().map(|v| v.get(m)).collect();
            let b: Vec<f64> = recent.iter().map(|v| v.get(m)).collect();
            compare_samples(m, &a, &b, bins)
        })
        .collect::<Result<_>>()?;
    Ok(TemporalReport {
        cutoff_year,
        n_old: old.len(),
        n_recent: recent.len(),
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_edge_rule() {
        let h = normalized_histogram(&[0.0, 0.5, 1.0], 2, 0.0, 1.0).unwrap();
        assert_eq!(h.masses, vec![1.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn histogram_point_mass() {
        let h = normalized_histogram(&[0.5; 7], 4, 0.0, 1.0).unwrap();
        assert_eq!(h.masses, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn histogram_empty_and_clamped() {
        let h = normalized_histogram(&[], 3, 0.0, 1.0).unwrap();
        assert_eq!(h.masses, vec![0.0; 3]);
        assert_eq!(h.sample_count, 0);
        let h = normalized_histogram(&[-1.0, 2.0, 0.5], 2, 0.0, 1.0).unwrap();
        assert_eq!(h.clamped, 2);
        assert_eq!(h.masses, vec![1.0 / 3.0, 2.0 / 3.0]);
        assert!(normalized_histogram(&[1.0], 0, 0.0, 1.0).is_err());
        assert!(normalized_histogram(&[1.0], 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn histogram_interior_edges_exact() {
        // 0.3 and 0.7 are not representable; the edge rule must still hold.
        for bins in [10usize, 20] {
            for k in 1..bins {
                let edge = k as f64 / bins as f64;
                let h = normalized_histogram(&[edge], bins, 0.0, 1.0).unwrap();
                let idx = h.masses.iter().position(|&m| m == 1.0).unwrap();
                assert!(h.bin_edges[idx] <= edge && edge < h.bin_edges[idx + 1]);
            }
        }
    }

    #[test]
    fn welch_identical_samples() {
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welch_matches_reference_values() {
        // reference values from scipy.stats.ttest_ind(..., equal_var=False)
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((r.t_statistic - -3.6742346141747673).abs() < 1e-9);
        assert!((r.p_value - 0.021311641128756727).abs() < 1e-9);
        assert!((r.degrees_of_freedom - 4.0).abs() < 1e-12);

        let r = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 10.0], &[2.5, 3.0, 3.1]).unwrap();
        assert!((r.t_statistic - 0.7118955437664617).abs() < 1e-9);
        assert!((r.p_value - 0.514862080092536).abs() < 1e-9);
        assert!((r.degrees_of_freedom - 4.109421371283831).abs() < 1e-9);

        let r = welch_t_test(&[0.1, 0.5, 0.9, 1.3], &[2.0, 2.2, 2.9, 3.1, 3.3, 4.0]).unwrap();
        assert!((r.t_statistic - -5.595352053425228).abs() < 1e-9);
        assert!((r.p_value - 0.0005325390867231674).abs() < 1e-12);
    }

    #[test]
    fn welch_errors_and_degenerate_cases() {
        assert!(matches!(
            welch_t_test(&[1.0], &[1.0, 2.0]),
            Err(Error::InsufficientSamples { n_a: 1, n_b: 2 })
        ));
        let r = welch_t_test(&[2.0, 2.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(r.p_value, 1.0);
        let r = welch_t_test(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert_eq!(r.t_statistic, f64::NEG_INFINITY);
    }

    #[test]
    fn tiny_p_value_formatting() {
        let a: Vec<f64> = (0..50).map(|i| 1000.0 + 1e-3 * (i % 5) as f64).collect();
        let b: Vec<f64> = (0..50).map(|i| 1e-3 * (i % 7) as f64).collect();
        let r = welch_t_test(&a, &b).unwrap();
        assert!(r.p_value < 2.2e-16);
        assert_eq!(format_p_value(r.p_value), "< 2.2e-16");
        assert_eq!(format_p_value(9.44e-8), "9.44e-08");
        assert_eq!(format_p_value(0.168), "0.168");
        assert_eq!(format_p_value(1.0), "1.000");
        assert_eq!(format_p_value(3.52e-15), "3.52e-15");
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[0.1, 0.9, 0.2]), Some(0.2));
        assert!((median(&[0.2, 0.4]).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(median(&[]), None);
    }
}
