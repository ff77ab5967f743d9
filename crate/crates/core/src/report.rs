//! CSV and JSON artifact writers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::PaperId;
use crate::impact::{CurveRow, ImpactRecord};
use crate::metrics::{Metric, MetricVector};
use crate::stats::{format_p_value, MetricComparison};

/// Formats `v` with 6 significant digits, like C's `%.6g`.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_metrics_csv<W: Write>(
    mut w: W,
    rows: &[(PaperId, usize, MetricVector)],
) -> std::io::Result<()> {
    write!(w, "paper_id,n_cited")?;
    for m in Metric::ALL {
        write!(w, ",{m}")?;
    }
    writeln!(w)?;
    for (id, n, v) in rows {
        write!(w, "{id},{n}")?;
        for m in Metric::ALL {
            write!(w, ",{}", fmt_sig6(v.get(m)))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_impact_csv<W: Write>(mut w: W, records: &[ImpactRecord]) -> std::io::Result<()> {
    writeln!(w, "paper_id,year,area,raw_citations,impact,stratum")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.paper,
            r.year,
            r.area,
            r.raw_citations,
            fmt_sig6(r.impact),
            r.stratum
        )?;
    }
    Ok(())
}

/// One row per bin with the two masses side by side.
pub fn write_histogram_pair_csv<W: Write>(
    mut w: W,
    cmp: &MetricComparison,
    label_a: &str,
    label_b: &str,
) -> std::io::Result<()> {
    writeln!(w, "bin_lo,bin_hi,{label_a},{label_b}")?;
    let edges = &cmp.histogram_a.bin_edges;
    for k in 0..cmp.histogram_a.bin_count() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_sig6(edges[k]),
            fmt_sig6(edges[k + 1]),
            fmt_sig6(cmp.histogram_a.masses[k]),
            fmt_sig6(cmp.histogram_b.masses[k])
        )?;
    }
    Ok(())
}

pub fn write_curves_csv<W: Write>(mut w: W, rows: &[CurveRow]) -> std::io::Result<()> {
    write!(w, "area,impact_bin,count")?;
    for m in Metric::ALL {
        write!(w, ",{m}")?;
    }
    writeln!(w)?;
    for r in rows {
        write!(w, "{},{},{}", r.area, r.bin, r.count)?;
        for v in r.medians {
            write!(w, ",{}", fmt_sig6(v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Welch test summary lines, `metric,mean_a,mean_b,t,df,p`.
pub fn write_tests_csv<W: Write>(
    mut w: W,
    comparisons: &[MetricComparison],
    label_a: &str,
    label_b: &str,
) -> std::io::Result<()> {
    writeln!(w, "feature,mean_{label_a},mean_{label_b},t,df,p")?;
    for c in comparisons {
        match &c.t_test {
            Some(t) => writeln!(
                w,
                "{},{},{},{},{},{}",
                c.metric,
                fmt_sig6(t.mean_a),
                fmt_sig6(t.mean_b),
                fmt_sig6(t.t_statistic),
                fmt_sig6(t.degrees_of_freedom),
                format_p_value(t.p_value)
            )?,
            None => writeln!(w, "{},NA,NA,NA,NA,NA", c.metric)?,
        }
    }
    Ok(())
}

/// Writes a file in one go so that partially written artifacts never appear.
pub fn write_file(
    path: &Path,
    f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `<prefix>_<metric>.csv` for every comparison.
pub fn write_histogram_set(
    dir: &Path,
    prefix: &str,
    comparisons: &[MetricComparison],
    label_a: &str,
    label_b: &str,
) -> Result<()> {
    for c in comparisons {
        let path = dir.join(format!("{prefix}_{}.csv", c.metric));
        write_file(&path, |b| write_histogram_pair_csv(b, c, label_a, label_b))?;
    }
    Ok(())
}

/// Metric vectors keyed by paper, for table builders.
pub fn vectors_by_paper(rows: &[(PaperId, usize, MetricVector)]) -> BTreeMap<PaperId, MetricVector> {
    rows.iter().map(|(id, _, v)| (id.clone(), *v)).collect()
}
