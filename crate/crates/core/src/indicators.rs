//! Recruitment (R), turnover (T) and overall mobility (M) effectiveness.
//!
//! Each recruit or leaver is compared twice. Internally, against the mean
//! salary-normalized FSS of the university's incumbents in the same field
//! (all ranks pooled). Externally, against the national mean raw FSS of
//! professors with the same field and rank. The x.1 indicators average
//! per-person ratios. The x.2 indicators are shares of strict wins
//! (recruits above the mean, leavers below it). M combines R and T weighted
//! by how many people fed each.
//!
//! A zero denominator is replaced by the smallest positive value of the
//! relevant distribution, and the numerator is raised by the same amount.
//! When the distribution has no positive value the ratio is not computable
//! and that person is left out of the mean.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::mobility::UniversityCohorts;
use crate::model::{IssueLog, Rank, ResearcherId, SalaryWeights, SdsCode, UniversityId};
use crate::scoring::{percentile_rank, salary_normalize, Productivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Indicator {
    R11,
    R12,
    R21,
    R22,
    T11,
    T12,
    T21,
    T22,
    M11,
    M12,
    M21,
    M22,
}

impl Indicator {
    pub const ALL: [Indicator; 12] = [
        Indicator::R11,
        Indicator::R12,
        Indicator::R21,
        Indicator::R22,
        Indicator::T11,
        Indicator::T12,
        Indicator::T21,
        Indicator::T22,
        Indicator::M11,
        Indicator::M12,
        Indicator::M21,
        Indicator::M22,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        [
            "R 1.1", "R 1.2", "R 2.1", "R 2.2", "T 1.1", "T 1.2", "T 2.1", "T 2.2", "M 1.1",
            "M 1.2", "M 2.1", "M 2.2",
        ][self.index()]
    }

    /// Machine-friendly name, e.g. `r1_1`.
    pub fn key(self) -> &'static str {
        [
            "r1_1", "r1_2", "r2_1", "r2_2", "t1_1", "t1_2", "t2_1", "t2_2", "m1_1", "m1_2", "m2_1",
            "m2_2",
        ][self.index()]
    }

    /// x.2 indicators are fractions of people, reported as percentages.
    pub fn is_share(self) -> bool {
        matches!(
            self,
            Indicator::R12
                | Indicator::R22
                | Indicator::T12
                | Indicator::T22
                | Indicator::M12
                | Indicator::M22
        )
    }

    /// The four indicators of one table, in column order.
    pub fn family(first: Indicator) -> [Indicator; 4] {
        let i = first.index() / 4 * 4;
        [
            Self::ALL[i],
            Self::ALL[i + 1],
            Self::ALL[i + 2],
            Self::ALL[i + 3],
        ]
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InternalAverage {
    pub university_id: UniversityId,
    pub sds_code: SdsCode,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExternalAverage {
    pub sds_code: SdsCode,
    pub rank: Rank,
    pub value: f64,
}

/// `(numerator + eps) / eps` with `eps` the smallest strictly positive value
/// in `distribution`; `None` when there is no positive value.
pub fn substitute_degenerate(
    numerator: f64,
    distribution: impl IntoIterator<Item = f64>,
) -> Option<f64> {
    let eps = smallest_positive(distribution)?;
    Some((numerator + eps) / eps)
}

fn smallest_positive(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values
        .into_iter()
        .filter(|v| *v > 0.0)
        .min_by(f64::total_cmp)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Comparison pools shared by every university's evaluation.
pub struct Comparisons<'a> {
    productivity: &'a Productivity,
    salary_weights: &'a SalaryWeights,
    /// Salary-normalized FSS of incumbents per (university, field).
    internal: BTreeMap<(UniversityId, SdsCode), Vec<(ResearcherId, f64)>>,
    /// Raw FSS of all professors per (field, rank).
    external: BTreeMap<(SdsCode, Rank), Vec<f64>>,
    /// Salary-normalized FSS of all professors per field, used for the
    /// substitution when an internal pool has no positive value.
    national_normalized: BTreeMap<SdsCode, Vec<f64>>,
}

impl<'a> Comparisons<'a> {
    pub fn new(
        cohorts: &BTreeMap<UniversityId, UniversityCohorts>,
        productivity: &'a Productivity,
        salary_weights: &'a SalaryWeights,
    ) -> Self {
        let mut internal: BTreeMap<(UniversityId, SdsCode), Vec<(ResearcherId, f64)>> =
            BTreeMap::new();
        for (u, c) in cohorts {
            for (id, rank) in &c.incumbents {
                if let Some(record) = productivity.get(id) {
                    internal
                        .entry((u.clone(), record.sds_code.clone()))
                        .or_default()
                        .push((
                            id.clone(),
                            salary_normalize(record.fss, *rank, salary_weights),
                        ));
                }
            }
        }
        let mut external: BTreeMap<(SdsCode, Rank), Vec<f64>> = BTreeMap::new();
        let mut national_normalized: BTreeMap<SdsCode, Vec<f64>> = BTreeMap::new();
        for r in &productivity.records {
            external
                .entry((r.sds_code.clone(), r.rank))
                .or_default()
                .push(r.fss);
            national_normalized
                .entry(r.sds_code.clone())
                .or_default()
                .push(r.fss_salary_norm);
        }
        Self {
            productivity,
            salary_weights,
            internal,
            external,
            national_normalized,
        }
    }

    fn internal_pool(
        &self,
        university: &UniversityId,
        sds: &SdsCode,
        exclude: Option<&ResearcherId>,
    ) -> Vec<f64> {
        self.internal
            .get(&(university.clone(), sds.clone()))
            .map(|pool| {
                pool.iter()
                    .filter(|(id, _)| Some(id) != exclude)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Mean salary-normalized FSS of the incumbents of one field at one
    /// university, optionally leaving one person out.
    pub fn internal_average(
        &self,
        university: &UniversityId,
        sds: &SdsCode,
        exclude: Option<&ResearcherId>,
    ) -> Option<InternalAverage> {
        mean(&self.internal_pool(university, sds, exclude)).map(|value| InternalAverage {
            university_id: university.clone(),
            sds_code: sds.clone(),
            value,
        })
    }

    pub fn external_average(&self, sds: &SdsCode, rank: Rank) -> Option<ExternalAverage> {
        self.external
            .get(&(sds.clone(), rank))
            .and_then(|pool| mean(pool))
            .map(|value| ExternalAverage {
                sds_code: sds.clone(),
                rank,
                value,
            })
    }

    /// Internal pool values, falling back to the national field
    /// distribution when the pool has nothing positive.
    fn internal_epsilon_source(&self, pool: &[f64], sds: &SdsCode) -> Vec<f64> {
        if smallest_positive(pool.iter().copied()).is_some() {
            pool.to_vec()
        } else {
            self.national_normalized
                .get(sds)
                .cloned()
                .unwrap_or_default()
        }
    }

    fn evaluate(
        &self,
        university: &UniversityId,
        id: &ResearcherId,
        rank: Rank,
        side: Side,
        issues: &mut IssueLog,
    ) -> Option<PersonOutcome> {
        let Some(record) = self.productivity.get(id) else {
            issues.warning(
                format!("researcher {id}"),
                "no productivity record; left out of the indicators",
            );
            return None;
        };
        let sds = &record.sds_code;
        let locus = || format!("{university}/{id}");
        let mut outcome = PersonOutcome::default();

        let exclude = (side == Side::Leaver).then_some(id);
        let pool = self.internal_pool(university, sds, exclude);
        match mean(&pool) {
            None => issues.warning(
                locus(),
                format!(
                    "no incumbents of field {sds} to compare with; internal indicators skipped"
                ),
            ),
            Some(avg) => {
                let own = salary_normalize(record.fss, rank, self.salary_weights);
                let ratio = side.ratio(own, avg, || self.internal_epsilon_source(&pool, sds));
                if ratio.is_none() {
                    issues.warning(
                        locus(),
                        "internal ratio not computable: all productivity is zero",
                    );
                }
                outcome.internal_ratio = ratio;
                outcome.internal_win = Some(side.wins(own, avg));
            }
        }

        let external = self.external.get(&(sds.clone(), rank));
        match external.and_then(|p| mean(p)) {
            None => issues.warning(
                locus(),
                format!("no national professors of field {sds} at rank {rank}; external indicators skipped"),
            ),
            Some(avg) => {
                let pool = external.expect("mean implies a pool");
                let ratio = side.ratio(record.fss, avg, || pool.clone());
                if ratio.is_none() {
                    issues.warning(locus(), "external ratio not computable: all productivity is zero");
                }
                outcome.external_ratio = ratio;
                outcome.external_win = Some(side.wins(record.fss, avg));
            }
        }
        Some(outcome)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Recruit,
    Leaver,
}

impl Side {
    /// Recruits: own / average. Leavers: average / own.
    fn ratio(self, own: f64, average: f64, distribution: impl FnOnce() -> Vec<f64>) -> Option<f64> {
        let (numerator, denominator) = match self {
            Side::Recruit => (own, average),
            Side::Leaver => (average, own),
        };
        if denominator > 0.0 {
            Some(numerator / denominator)
        } else {
            substitute_degenerate(numerator, distribution())
        }
    }

    fn wins(self, own: f64, average: f64) -> bool {
        match self {
            Side::Recruit => own > average,
            Side::Leaver => own < average,
        }
    }
}

/// One person's contribution to the four indicators of their side.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PersonOutcome {
    pub internal_ratio: Option<f64>,
    pub internal_win: Option<bool>,
    pub external_ratio: Option<f64>,
    pub external_win: Option<bool>,
}

impl PersonOutcome {
    fn values(&self) -> [Option<f64>; 4] {
        let bit = |w: Option<bool>| w.map(|w| if w { 1.0 } else { 0.0 });
        [
            self.internal_ratio,
            bit(self.internal_win),
            self.external_ratio,
            bit(self.external_win),
        ]
    }
}

/// Four indicators of one side with the number of people behind each.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SideIndicators {
    pub values: [Option<f64>; 4],
    pub counts: [usize; 4],
}

#[derive(Debug, Default)]
struct Accumulator {
    sums: [f64; 4],
    counts: [usize; 4],
}

impl Accumulator {
    fn add(&mut self, outcome: &PersonOutcome) {
        for (i, v) in outcome.values().into_iter().enumerate() {
            if let Some(v) = v {
                self.sums[i] += v;
                self.counts[i] += 1;
            }
        }
    }

    fn finish(&self) -> SideIndicators {
        let mut out = SideIndicators {
            counts: self.counts,
            ..Default::default()
        };
        for i in 0..4 {
            out.values[i] = (self.counts[i] > 0).then(|| self.sums[i] / self.counts[i] as f64);
        }
        out
    }
}

/// R 1.1, R 1.2, R 2.1, R 2.2 for one university.
pub fn recruitment_effectiveness(
    cohorts: &UniversityCohorts,
    comparisons: &Comparisons<'_>,
    issues: &mut IssueLog,
) -> SideIndicators {
    side_effectiveness(cohorts, comparisons, Side::Recruit, issues)
}

/// T 1.1, T 1.2, T 2.1, T 2.2 for one university.
pub fn turnover_effectiveness(
    cohorts: &UniversityCohorts,
    comparisons: &Comparisons<'_>,
    issues: &mut IssueLog,
) -> SideIndicators {
    side_effectiveness(cohorts, comparisons, Side::Leaver, issues)
}

fn side_effectiveness(
    cohorts: &UniversityCohorts,
    comparisons: &Comparisons<'_>,
    side: Side,
    issues: &mut IssueLog,
) -> SideIndicators {
    let mut acc = Accumulator::default();
    accumulate(&mut acc, cohorts, comparisons, side, issues);
    acc.finish()
}

fn accumulate(
    acc: &mut Accumulator,
    cohorts: &UniversityCohorts,
    comparisons: &Comparisons<'_>,
    side: Side,
    issues: &mut IssueLog,
) {
    let members = match side {
        Side::Recruit => &cohorts.recruits,
        Side::Leaver => &cohorts.leavers,
    };
    for (id, rank) in members {
        if let Some(outcome) = comparisons.evaluate(&cohorts.university_id, id, *rank, side, issues)
        {
            acc.add(&outcome);
        }
    }
}

/// `(n * r + p * t) / (n + p)`. An undefined side carries no weight.
pub fn mobility_effectiveness(n: usize, r: Option<f64>, p: usize, t: Option<f64>) -> Option<f64> {
    match (r.filter(|_| n > 0), t.filter(|_| p > 0)) {
        (Some(r), Some(t)) => Some((n as f64 * r + p as f64 * t) / (n + p) as f64),
        (Some(r), None) => Some(r),
        (None, Some(t)) => Some(t),
        (None, None) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectivenessReport {
    /// `Total` for the national row.
    pub university_id: UniversityId,
    pub n_recruits: usize,
    pub n_leavers: usize,
    pub eligible: bool,
    pub values: [Option<f64>; 12],
    /// People behind each value (after dropping non-computable ratios).
    pub counts: [usize; 12],
    /// Among eligible universities; `None` with fewer than two values.
    pub percentiles: [Option<u8>; 12],
}

impl EffectivenessReport {
    pub fn value(&self, indicator: Indicator) -> Option<f64> {
        self.values[indicator.index()]
    }

    pub fn percentile(&self, indicator: Indicator) -> Option<u8> {
        self.percentiles[indicator.index()]
    }

    fn from_sides(
        university_id: UniversityId,
        n_recruits: usize,
        n_leavers: usize,
        eligible: bool,
        r: SideIndicators,
        t: SideIndicators,
    ) -> Self {
        let mut values = [None; 12];
        let mut counts = [0; 12];
        for i in 0..4 {
            values[i] = r.values[i];
            counts[i] = r.counts[i];
            values[4 + i] = t.values[i];
            counts[4 + i] = t.counts[i];
            values[8 + i] =
                mobility_effectiveness(r.counts[i], r.values[i], t.counts[i], t.values[i]);
            counts[8 + i] = r.counts[i] + t.counts[i];
        }
        Self {
            university_id,
            n_recruits,
            n_leavers,
            eligible,
            values,
            counts,
            percentiles: [None; 12],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectivenessTable {
    /// Eligible universities, ordered by id.
    pub rows: Vec<EffectivenessReport>,
    /// Every recruit and leaver in the system pooled.
    pub total: EffectivenessReport,
}

impl EffectivenessTable {
    /// Rows ordered for a table led by `first`: descending value, missing
    /// values last, ties by university id.
    pub fn sorted_by(&self, first: Indicator) -> Vec<&EffectivenessReport> {
        let mut rows: Vec<&EffectivenessReport> = self.rows.iter().collect();
        rows.sort_by(|a, b| {
            let key = |r: &EffectivenessReport| r.value(first);
            match (key(a), key(b)) {
                (Some(x), Some(y)) => y.total_cmp(&x),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
            .then_with(|| a.university_id.cmp(&b.university_id))
        });
        rows
    }
}

/// Indicators for every eligible university plus the pooled national row.
pub fn full_report(
    cohorts: &BTreeMap<UniversityId, UniversityCohorts>,
    productivity: &Productivity,
    salary_weights: &SalaryWeights,
) -> (EffectivenessTable, IssueLog) {
    let mut issues = IssueLog::new();
    let comparisons = Comparisons::new(cohorts, productivity, salary_weights);

    let mut rows = Vec::new();
    let mut pooled_r = Accumulator::default();
    let mut pooled_t = Accumulator::default();
    let (mut total_n, mut total_p) = (0, 0);
    for c in cohorts.values() {
        total_n += c.recruits.len();
        total_p += c.leavers.len();
        if c.eligible {
            let r = recruitment_effectiveness(c, &comparisons, &mut issues);
            let t = turnover_effectiveness(c, &comparisons, &mut issues);
            rows.push(EffectivenessReport::from_sides(
                c.university_id.clone(),
                c.recruits.len(),
                c.leavers.len(),
                true,
                r,
                t,
            ));
        }
        // Pooling re-evaluates everyone; its issues duplicate the per-row ones.
        let mut scratch = IssueLog::new();
        accumulate(&mut pooled_r, c, &comparisons, Side::Recruit, &mut scratch);
        accumulate(&mut pooled_t, c, &comparisons, Side::Leaver, &mut scratch);
        if !c.eligible {
            issues.extend(scratch);
        }
    }
    let total = EffectivenessReport::from_sides(
        UniversityId::from("Total"),
        total_n,
        total_p,
        false,
        pooled_r.finish(),
        pooled_t.finish(),
    );

    assign_percentiles(&mut rows);
    if rows.is_empty() {
        issues.warning("report", "no university meets the minimum group sizes");
    }
    (EffectivenessTable { rows, total }, dedup(issues))
}

fn dedup(issues: IssueLog) -> IssueLog {
    let mut seen = std::collections::HashSet::new();
    issues
        .into_iter()
        .filter(|i| seen.insert(i.clone()))
        .collect::<Vec<_>>()
        .into()
}

fn assign_percentiles(rows: &mut [EffectivenessReport]) {
    for indicator in Indicator::ALL {
        let i = indicator.index();
        let present: Vec<(usize, f64)> = rows
            .iter()
            .enumerate()
            .filter_map(|(row, r)| r.values[i].map(|v| (row, v)))
            .collect();
        let values: Vec<f64> = present.iter().map(|(_, v)| *v).collect();
        let ranks: Result<Vec<u8>> = percentile_rank(&values);
        if let Ok(ranks) = ranks {
            for ((row, _), rank) in present.iter().zip(ranks) {
                rows[*row].percentiles[i] = Some(rank);
            }
        }
    }
}

/// Salary-normalized FSS by researcher, for callers that want to audit the
/// internal comparisons.
pub fn normalized_fss(productivity: &Productivity) -> HashMap<ResearcherId, f64> {
    productivity
        .records
        .iter()
        .map(|r| (r.researcher_id.clone(), r.fss_salary_norm))
        .collect()
}
