//! Spearman rank correlation with midrank ties, and the correlation matrix
//! over the effectiveness indicators and university productivity.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::indicators::{EffectivenessReport, Indicator};
use crate::model::UniversityId;

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i+1 ..= j share their mean.
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho over the pairs where both sides are present, with the
/// number of such pairs. `None` with fewer than 3 pairs or when either side
/// is constant.
///
/// # Panics
///
/// If the slices differ in length.
pub fn spearman(x: &[Option<f64>], y: &[Option<f64>]) -> Option<(f64, usize)> {
    assert_eq!(x.len(), y.len(), "spearman needs paired samples");
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .unzip();
    let n = xs.len();
    if n < 3 {
        return None;
    }
    pearson(&midranks(&xs), &midranks(&ys)).map(|rho| (rho, n))
}

/// Convenience form for complete samples.
pub fn spearman_complete(x: &[f64], y: &[f64]) -> Option<f64> {
    let wrap = |v: &[f64]| v.iter().copied().map(Some).collect::<Vec<_>>();
    spearman(&wrap(x), &wrap(y)).map(|(rho, _)| rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationCell {
    pub rho: Option<f64>,
    pub n: usize,
}

/// Lower-triangular Spearman matrix; row `i` holds cells for columns
/// `0..i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<CorrelationCell>>,
}

impl CorrelationMatrix {
    pub fn get(&self, row: usize, col: usize) -> Option<CorrelationCell> {
        let (r, c) = if row > col { (row, col) } else { (col, row) };
        (r != c).then(|| self.values[r][c])
    }
}

pub const PRODUCTIVITY_LABEL: &str = "Productivity";

/// Correlations among the twelve indicators and university productivity
/// across the given universities, with pairwise deletion of missing values.
pub fn correlation_matrix(
    reports: &[EffectivenessReport],
    productivity: &BTreeMap<UniversityId, f64>,
) -> CorrelationMatrix {
    let mut labels: Vec<String> = Indicator::ALL
        .iter()
        .map(|i| i.label().to_string())
        .collect();
    labels.push(PRODUCTIVITY_LABEL.to_string());

    let mut series: Vec<Vec<Option<f64>>> = Indicator::ALL
        .iter()
        .map(|ind| reports.iter().map(|r| r.value(*ind)).collect())
        .collect();
    series.push(
        reports
            .iter()
            .map(|r| productivity.get(&r.university_id).copied())
            .collect(),
    );

    let values = (0..series.len())
        .map(|i| {
            (0..i)
                .map(|j| match spearman(&series[i], &series[j]) {
                    Some((rho, n)) => CorrelationCell { rho: Some(rho), n },
                    None => CorrelationCell {
                        rho: None,
                        n: paired(&series[i], &series[j]),
                    },
                })
                .collect()
        })
        .collect();
    CorrelationMatrix { labels, values }
}

fn paired(x: &[Option<f64>], y: &[Option<f64>]) -> usize {
    x.iter()
        .zip(y)
        .filter(|(a, b)| a.is_some() && b.is_some())
        .count()
}
