//! Individual productivity.
//!
//! Citations are scaled by the mean citations of *cited* publications in the
//! same year and subject category, then fractionalized by co-authorship
//! credit and averaged over the researcher's years of service:
//!
//! ```text
//! FSS = (1/t) * sum_i (c_i / c_bar_i) * f_i
//! ```
//!
//! Baselines are computed from whatever corpus is loaded, so scores are
//! relative to that corpus. A publication in several categories is scaled by
//! the arithmetic mean of its categories' baselines.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::credit::{positional_fractions, CreditScheme};
use crate::error::{Error, Result};
use crate::model::{
    period_profiles, AssessmentConfig, CategoryCode, Dataset, IssueLog, Period, PeriodProfile,
    Publication, Rank, ResearcherId, RosterEntry, SalaryWeights, SdsCode, UdaCode, UniversityId,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CitationBaseline {
    pub year: i32,
    pub category: CategoryCode,
    pub c_bar: f64,
}

/// Mean citations of cited publications per (year, category) stratum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Baselines {
    strata: BTreeMap<(i32, CategoryCode), f64>,
}

impl Baselines {
    pub fn get(&self, year: i32, category: &CategoryCode) -> Option<f64> {
        self.strata.get(&(year, category.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = CitationBaseline> + '_ {
        self.strata
            .iter()
            .map(|((year, category), c_bar)| CitationBaseline {
                year: *year,
                category: category.clone(),
                c_bar: *c_bar,
            })
    }

    /// Mean of the baselines of the publication's categories; categories
    /// without a baseline are skipped.
    pub fn effective(&self, publication: &Publication) -> Option<f64> {
        let (sum, n) = publication
            .subject_categories
            .iter()
            .filter_map(|c| self.get(publication.year, c))
            .fold((0.0, 0usize), |(s, n), b| (s + b, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

pub fn compute_baselines(dataset: &Dataset, period: Period) -> Baselines {
    let mut totals: BTreeMap<(i32, CategoryCode), (u64, u64)> = BTreeMap::new();
    for publication in dataset.publications() {
        if publication.citations == 0 || !period.contains(publication.year) {
            continue;
        }
        for category in &publication.subject_categories {
            let t = totals
                .entry((publication.year, category.clone()))
                .or_default();
            t.0 += publication.citations;
            t.1 += 1;
        }
    }
    Baselines {
        strata: totals
            .into_iter()
            .map(|(k, (sum, n))| (k, sum as f64 / n as f64))
            .collect(),
    }
}

/// Citations divided by the effective baseline; 0 for uncited publications.
///
/// # Panics
///
/// If a cited publication has no baseline, which cannot happen when the
/// baselines were computed from a corpus containing it.
pub fn scaled_citation(publication: &Publication, baselines: &Baselines) -> f64 {
    if publication.citations == 0 {
        return 0.0;
    }
    let c_bar = baselines.effective(publication).unwrap_or_else(|| {
        panic!(
            "cited publication {} has no citation baseline",
            publication.pub_id
        )
    });
    publication.citations as f64 / c_bar
}

/// Distinct roster years inside the period.
pub fn service_years(career: &[RosterEntry], period: Period) -> u32 {
    let mut years: Vec<i32> = career
        .iter()
        .map(|e| e.year)
        .filter(|y| period.contains(*y))
        .collect();
    years.sort_unstable();
    years.dedup();
    years.len() as u32
}

pub fn salary_normalize(fss: f64, rank: Rank, weights: &SalaryWeights) -> f64 {
    fss / weights.relative(rank)
}

/// Percentile on a 0 (worst) to 100 (best) scale. Tied values share the best
/// rank of their block: `round(100 * (below + tied - 1) / (N - 1))`, with
/// halves rounded up.
pub fn percentile_rank(values: &[f64]) -> Result<Vec<u8>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "percentile ranks need at least 2 values, got {n}"
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("percentile ranks of NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = (n - 1) as u64;
    Ok(values
        .iter()
        .map(|v| {
            let at_or_below = sorted.partition_point(|x| x <= v) as u64;
            let k = at_or_below - 1;
            // floor(100k/d + 1/2) in integers.
            ((200 * k + d) / (2 * d)) as u8
        })
        .collect())
}

/// FSS over the mean FSS of the comparison pool. A zero pool mean only
/// occurs when every member, this one included, scored zero.
pub fn fss_ratio(fss: f64, pool_mean: f64) -> f64 {
    if pool_mean > 0.0 {
        fss / pool_mean
    } else {
        0.0
    }
}

/// Byline credit lookup for every publication in a dataset.
#[derive(Debug, Clone, Default)]
pub struct CreditTable {
    positional: Vec<Option<Vec<f64>>>,
}

impl CreditTable {
    /// Precomputes positional vectors for publications with at least one
    /// author whose field uses the positional scheme.
    pub fn build(
        dataset: &Dataset,
        schemes: &HashMap<ResearcherId, CreditScheme>,
        config: &AssessmentConfig,
    ) -> (Self, IssueLog) {
        let mut issues = IssueLog::new();
        let positional = dataset
            .publications()
            .iter()
            .map(|p| {
                let needed = p.authors.iter().any(|s| {
                    s.researcher_id
                        .as_ref()
                        .and_then(|id| schemes.get(id))
                        .is_some_and(|s| *s == CreditScheme::Positional)
                });
                needed.then(|| {
                    positional_fractions(
                        &p.authors,
                        &config.positional_weights,
                        &mut issues,
                        &format!("publication {}", p.pub_id),
                    )
                    .expect("validated publications have authors")
                })
            })
            .collect();
        (Self { positional }, issues)
    }

    pub fn weight(
        &self,
        dataset: &Dataset,
        publication: usize,
        slot: usize,
        scheme: CreditScheme,
    ) -> f64 {
        match (
            scheme,
            self.positional.get(publication).and_then(Option::as_ref),
        ) {
            (CreditScheme::Positional, Some(w)) => w[slot],
            _ => 1.0 / dataset.publications()[publication].n_authors() as f64,
        }
    }
}

/// FSS of one researcher: credited scaled citations of period publications
/// per year of service.
pub fn compute_fss(
    researcher: &ResearcherId,
    service_years: u32,
    scheme: CreditScheme,
    dataset: &Dataset,
    baselines: &Baselines,
    credit: &CreditTable,
    period: Period,
) -> f64 {
    if service_years == 0 {
        return 0.0;
    }
    let total: f64 = dataset
        .authorships(researcher)
        .iter()
        .filter_map(|a| {
            let publication = &dataset.publications()[a.publication];
            period.contains(publication.year).then(|| {
                scaled_citation(publication, baselines)
                    * credit.weight(dataset, a.publication, a.slot, scheme)
            })
        })
        .sum();
    total / service_years as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductivityRecord {
    pub researcher_id: ResearcherId,
    /// University, field, area and rank of the last roster year in the period.
    pub university_id: UniversityId,
    pub sds_code: SdsCode,
    pub uda_code: UdaCode,
    pub rank: Rank,
    pub t: u32,
    pub fss: f64,
    pub fss_salary_norm: f64,
    /// Within field and rank, nationally; `None` when the pool has one member.
    pub percentile: Option<u8>,
    pub fss_ratio: Option<f64>,
}

/// Per-researcher productivity, ordered by researcher id.
#[derive(Debug, Clone, Default)]
pub struct Productivity {
    pub records: Vec<ProductivityRecord>,
    index: HashMap<ResearcherId, usize>,
}

impl Productivity {
    /// Wraps precomputed records; they are re-sorted by researcher id.
    pub fn from_records(mut records: Vec<ProductivityRecord>) -> Self {
        records.sort_by(|a, b| a.researcher_id.cmp(&b.researcher_id));
        let index = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.researcher_id.clone(), i))
            .collect();
        Self { records, index }
    }

    pub fn get(&self, id: &ResearcherId) -> Option<&ProductivityRecord> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn fss(&self, id: &ResearcherId) -> Option<f64> {
        self.get(id).map(|r| r.fss)
    }
}

/// Scores every researcher present in the period. `baselines` should come
/// from the full corpus; `dataset` is usually the bibliometric restriction.
pub fn compute_productivity(
    dataset: &Dataset,
    baselines: &Baselines,
    config: &AssessmentConfig,
) -> (Productivity, IssueLog) {
    let period = config.period();
    let profiles = period_profiles(dataset, period);
    let schemes: HashMap<ResearcherId, CreditScheme> = profiles
        .iter()
        .map(|p| (p.researcher_id.clone(), config.scheme_for(&p.sds_code)))
        .collect();
    let (credit, issues) = CreditTable::build(dataset, &schemes, config);

    let mut records: Vec<ProductivityRecord> = profiles
        .into_par_iter()
        .map(|profile: PeriodProfile| {
            let scheme = schemes[&profile.researcher_id];
            let fss = compute_fss(
                &profile.researcher_id,
                profile.service_years,
                scheme,
                dataset,
                baselines,
                &credit,
                period,
            );
            ProductivityRecord {
                fss_salary_norm: salary_normalize(fss, profile.rank, &config.salary_weights),
                researcher_id: profile.researcher_id,
                university_id: profile.university_id,
                sds_code: profile.sds_code,
                uda_code: profile.uda_code,
                rank: profile.rank,
                t: profile.service_years,
                fss,
                percentile: None,
                fss_ratio: None,
            }
        })
        .collect();

    let mut pools: BTreeMap<(SdsCode, Rank), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        pools
            .entry((r.sds_code.clone(), r.rank))
            .or_default()
            .push(i);
    }
    for members in pools.values() {
        let values: Vec<f64> = members.iter().map(|&i| records[i].fss).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let percentiles = percentile_rank(&values).ok();
        for (k, &i) in members.iter().enumerate() {
            records[i].fss_ratio = Some(fss_ratio(records[i].fss, mean));
            records[i].percentile = percentiles.as_ref().map(|p| p[k]);
        }
    }

    (Productivity::from_records(records), issues)
}

/// Mean FSS ratio of the professors whose last period year is at each
/// university.
pub fn university_productivity(productivity: &Productivity) -> BTreeMap<UniversityId, f64> {
    let mut sums: BTreeMap<UniversityId, (f64, usize)> = BTreeMap::new();
    for r in &productivity.records {
        if let Some(ratio) = r.fss_ratio {
            let s = sums.entry(r.university_id.clone()).or_default();
            s.0 += ratio;
            s.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(u, (sum, n))| (u, sum / n as f64))
        .collect()
}

#[cfg(test)]
mod tests;
