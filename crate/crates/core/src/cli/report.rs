//! Report files. Numbers are written with fixed decimals: ratios to 2,
//! shares as percentages to 1. Missing values are empty cells.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::Result;
use crate::indicators::{EffectivenessReport, EffectivenessTable, Indicator};
use crate::mobility::{MobilitySummary, MobilityTable};
use crate::model::UniversityId;
use crate::scoring::Productivity;
use crate::stats::CorrelationMatrix;

fn fixed(v: Option<f64>, decimals: usize) -> String {
    v.map(|v| format!("{v:.decimals$}")).unwrap_or_default()
}

fn indicator_cell(report: &EffectivenessReport, indicator: Indicator) -> String {
    let v = report.value(indicator);
    if indicator.is_share() {
        fixed(v.map(|v| 100.0 * v), 1)
    } else {
        fixed(v, 2)
    }
}

pub fn indicator_header(first: Indicator) -> Vec<String> {
    let family = Indicator::family(first);
    let mut header = vec!["university".to_string()];
    header.extend(family.iter().map(|i| i.key().to_string()));
    header.extend(family.iter().map(|i| format!("{}_percentile", i.key())));
    header
}

/// One of the recruitment, turnover or mobility tables, sorted descending by
/// the table's first indicator and closed by the national row.
pub fn write_indicator_table(
    out: impl Write,
    table: &EffectivenessTable,
    first: Indicator,
) -> Result<()> {
    let family = Indicator::family(first);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(indicator_header(first))?;
    let row = |r: &EffectivenessReport, with_percentiles: bool| {
        let mut cells = vec![r.university_id.to_string()];
        cells.extend(family.iter().map(|i| indicator_cell(r, *i)));
        cells.extend(family.iter().map(|i| {
            if with_percentiles {
                r.percentile(*i).map(|p| p.to_string()).unwrap_or_default()
            } else {
                String::new()
            }
        }));
        cells
    };
    for r in table.sorted_by(first) {
        w.write_record(row(r, true))?;
    }
    w.write_record(row(&table.total, false))?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_mobility_summary(out: impl Write, table: &MobilityTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "uda",
        "incumbents",
        "recruits",
        "recruits_pct",
        "turnover",
        "turnover_pct",
        "total_mobility",
        "total_mobility_pct",
    ])?;
    let row = |s: &MobilitySummary| {
        [
            s.uda_code.to_string(),
            s.incumbents.to_string(),
            s.recruits.to_string(),
            fixed(s.recruits_pct(), 1),
            s.turnover.to_string(),
            fixed(s.turnover_pct(), 1),
            s.total_mobility.to_string(),
            fixed(s.total_mobility_pct(), 1),
        ]
    };
    for s in &table.rows {
        w.write_record(row(s))?;
    }
    w.write_record(row(&table.total))?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Lower triangle: rho to 2 decimals. Upper triangle: the number of
/// universities behind the mirrored cell. Header only when absent.
pub fn write_correlations(
    out: impl Write,
    matrix: Option<&CorrelationMatrix>,
    labels: &[String],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    if let Some(m) = matrix {
        for (i, label) in m.labels.iter().enumerate() {
            let mut cells = vec![label.clone()];
            for j in 0..m.labels.len() {
                cells.push(match m.get(i, j) {
                    None => String::new(),
                    Some(c) if j < i => fixed(c.rho, 2),
                    Some(c) => c.n.to_string(),
                });
            }
            w.write_record(&cells)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_university_productivity(
    out: impl Write,
    productivity: &BTreeMap<UniversityId, f64>,
    per_researcher: &Productivity,
) -> Result<()> {
    let mut counts: BTreeMap<&UniversityId, usize> = BTreeMap::new();
    for r in &per_researcher.records {
        *counts.entry(&r.university_id).or_default() += 1;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["university", "professors", "mean_fss_ratio"])?;
    for (u, v) in productivity {
        w.write_record([
            u.to_string(),
            counts.get(u).copied().unwrap_or(0).to_string(),
            format!("{v:.4}"),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-researcher scores at full precision (shortest round-trip form).
pub fn write_researcher_productivity(out: impl Write, productivity: &Productivity) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "researcher_id",
        "university_id",
        "sds_code",
        "rank",
        "t",
        "fss",
        "fss_salary_norm",
        "percentile",
        "fss_ratio",
    ])?;
    for r in &productivity.records {
        w.write_record([
            r.researcher_id.to_string(),
            r.university_id.to_string(),
            r.sds_code.to_string(),
            r.rank.to_string(),
            r.t.to_string(),
            r.fss.to_string(),
            r.fss_salary_norm.to_string(),
            r.percentile.map(|p| p.to_string()).unwrap_or_default(),
            r.fss_ratio.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
