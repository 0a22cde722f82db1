//! Career events from yearly rosters and the per-university cohorts built
//! from them.
//!
//! Consecutive roster years are compared per researcher. A one-year gap is
//! bridged; two or more missing years end the career (system exit) and start
//! a new one (new entrant). Rank changes in place are not events. Incumbents
//! are the university's roster in the first year of the period.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::model::{
    period_profiles, AssessmentConfig, Dataset, IssueLog, Period, Rank, ResearcherId, UdaCode,
    UniversityId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    NewEntrant,
    Transfer,
    SystemExit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CareerEvent {
    pub researcher_id: ResearcherId,
    pub kind: EventKind,
    /// First year of the new state.
    pub year: i32,
    pub origin_university: Option<UniversityId>,
    pub destination_university: Option<UniversityId>,
    /// Rank in the event year; for exits, the last rank held.
    pub rank_at_event: Rank,
    /// Rank in the last year before the event, when there was one.
    pub prior_rank: Option<Rank>,
}

/// Events dated inside the period, ordered by researcher then year.
pub fn derive_events(dataset: &Dataset, period: Period) -> (Vec<CareerEvent>, IssueLog) {
    let mut events = Vec::new();
    let mut issues = IssueLog::new();
    let Some(observed_from) = dataset.first_roster_year() else {
        return (events, issues);
    };

    for (id, career) in dataset.careers() {
        let mut emit = |event: CareerEvent| {
            if period.contains(event.year) {
                events.push(event);
            }
        };

        let first = &career[0];
        // Members of the first observed roster year may have been hired at
        // any earlier time, so they are never entrants.
        if first.year > observed_from {
            emit(CareerEvent {
                researcher_id: id.clone(),
                kind: EventKind::NewEntrant,
                year: first.year,
                origin_university: None,
                destination_university: Some(first.university_id.clone()),
                rank_at_event: first.rank,
                prior_rank: None,
            });
        }

        for pair in career.windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            let gap = next.year - prev.year - 1;
            if gap >= 2 {
                emit(CareerEvent {
                    researcher_id: id.clone(),
                    kind: EventKind::SystemExit,
                    year: prev.year + 1,
                    origin_university: Some(prev.university_id.clone()),
                    destination_university: None,
                    rank_at_event: prev.rank,
                    prior_rank: Some(prev.rank),
                });
                emit(CareerEvent {
                    researcher_id: id.clone(),
                    kind: EventKind::NewEntrant,
                    year: next.year,
                    origin_university: None,
                    destination_university: Some(next.university_id.clone()),
                    rank_at_event: next.rank,
                    prior_rank: None,
                });
                continue;
            }
            if gap == 1 && period.contains(next.year) {
                issues.warning(
                    format!("researcher {id}"),
                    format!(
                        "absent from the roster in {}; treated as continuous service",
                        prev.year + 1
                    ),
                );
            }
            if prev.university_id != next.university_id {
                emit(CareerEvent {
                    researcher_id: id.clone(),
                    kind: EventKind::Transfer,
                    year: next.year,
                    origin_university: Some(prev.university_id.clone()),
                    destination_university: Some(next.university_id.clone()),
                    rank_at_event: next.rank,
                    prior_rank: Some(prev.rank),
                });
            }
        }

        let last = &career[career.len() - 1];
        if last.year < period.end {
            emit(CareerEvent {
                researcher_id: id.clone(),
                kind: EventKind::SystemExit,
                year: last.year + 1,
                origin_university: Some(last.university_id.clone()),
                destination_university: None,
                rank_at_event: last.rank,
                prior_rank: Some(last.rank),
            });
        }
    }
    (events, issues)
}

/// The people a university is judged on. Each member carries the rank used
/// to compare them: incumbents at the period start, recruits in the year
/// they arrived, leavers in their last year at the university.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct UniversityCohorts {
    pub university_id: UniversityId,
    pub incumbents: BTreeMap<ResearcherId, Rank>,
    pub recruits: BTreeMap<ResearcherId, Rank>,
    pub leavers: BTreeMap<ResearcherId, Rank>,
    pub eligible: bool,
}

impl UniversityCohorts {
    fn new(university_id: UniversityId) -> Self {
        Self {
            university_id,
            ..Self::default()
        }
    }

    pub fn is_eligible(&self, min_group_size: usize) -> bool {
        self.recruits.len() >= min_group_size
            && self.leavers.len() >= min_group_size
            && self.incumbents.len() >= min_group_size
    }
}

pub fn build_cohorts(
    events: &[CareerEvent],
    dataset: &Dataset,
    config: &AssessmentConfig,
) -> (BTreeMap<UniversityId, UniversityCohorts>, IssueLog) {
    let period = config.period();
    let mut issues = IssueLog::new();
    let mut by_university: BTreeMap<UniversityId, UniversityCohorts> = BTreeMap::new();
    for entry in dataset.roster() {
        if !period.contains(entry.year) {
            continue;
        }
        let c = by_university
            .entry(entry.university_id.clone())
            .or_insert_with(|| UniversityCohorts::new(entry.university_id.clone()));
        if entry.year == period.start {
            c.incumbents.insert(entry.researcher_id.clone(), entry.rank);
        }
    }

    let mut leaver_of: HashMap<&ResearcherId, BTreeSet<&UniversityId>> = HashMap::new();
    for event in events {
        if let Some(destination) = &event.destination_university {
            let years_there = dataset
                .career(&event.researcher_id)
                .iter()
                .filter(|e| {
                    e.year >= event.year && e.year <= period.end && &e.university_id == destination
                })
                .count() as u32;
            if years_there >= config.min_service_years {
                by_university
                    .entry(destination.clone())
                    .or_insert_with(|| UniversityCohorts::new(destination.clone()))
                    .recruits
                    .entry(event.researcher_id.clone())
                    .or_insert(event.rank_at_event);
            }
        }
        if event.kind == EventKind::Transfer {
            let origin = event
                .origin_university
                .as_ref()
                .expect("transfers have an origin");
            by_university
                .entry(origin.clone())
                .or_insert_with(|| UniversityCohorts::new(origin.clone()))
                .leavers
                .entry(event.researcher_id.clone())
                .or_insert(event.prior_rank.unwrap_or(event.rank_at_event));
            leaver_of
                .entry(&event.researcher_id)
                .or_default()
                .insert(origin);
        }
    }
    let mut multi: Vec<_> = leaver_of.into_iter().filter(|(_, u)| u.len() > 1).collect();
    multi.sort();
    for (id, universities) in multi {
        let list: Vec<&str> = universities.iter().map(|u| u.as_str()).collect();
        issues.warning(
            format!("researcher {id}"),
            format!(
                "counted as a leaver at {} universities: {}",
                list.len(),
                list.join(", ")
            ),
        );
    }

    for c in by_university.values_mut() {
        let recruits = &c.recruits;
        c.incumbents.retain(|id, _| !recruits.contains_key(id));
        c.eligible = c.is_eligible(config.min_group_size);
    }
    (by_university, issues)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobilitySummary {
    pub uda_code: UdaCode,
    pub incumbents: usize,
    pub recruits: usize,
    pub turnover: usize,
    pub total_mobility: usize,
}

impl MobilitySummary {
    fn new(uda_code: UdaCode) -> Self {
        Self {
            uda_code,
            incumbents: 0,
            recruits: 0,
            turnover: 0,
            total_mobility: 0,
        }
    }

    fn share(&self, count: usize) -> Option<f64> {
        (self.incumbents > 0).then(|| 100.0 * count as f64 / self.incumbents as f64)
    }

    pub fn recruits_pct(&self) -> Option<f64> {
        self.share(self.recruits)
    }

    pub fn turnover_pct(&self) -> Option<f64> {
        self.share(self.turnover)
    }

    pub fn total_mobility_pct(&self) -> Option<f64> {
        self.share(self.total_mobility)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobilityTable {
    pub rows: Vec<MobilitySummary>,
    pub total: MobilitySummary,
}

/// Incumbents, recruits and leavers per discipline area, summed over
/// universities. A researcher's area is that of their last period year.
pub fn summarize_mobility(
    cohorts: &BTreeMap<UniversityId, UniversityCohorts>,
    dataset: &Dataset,
    period: Period,
) -> MobilityTable {
    let area: HashMap<ResearcherId, UdaCode> = period_profiles(dataset, period)
        .into_iter()
        .map(|p| (p.researcher_id, p.uda_code))
        .collect();
    let mut rows: BTreeMap<UdaCode, MobilitySummary> = area
        .values()
        .map(|uda| (uda.clone(), MobilitySummary::new(uda.clone())))
        .collect();

    for c in cohorts.values() {
        let mut tally = |members: &BTreeMap<ResearcherId, Rank>,
                         field: fn(&mut MobilitySummary) -> &mut usize| {
            for id in members.keys() {
                if let Some(row) = area.get(id).and_then(|uda| rows.get_mut(uda)) {
                    *field(row) += 1;
                }
            }
        };
        tally(&c.incumbents, |r| &mut r.incumbents);
        tally(&c.recruits, |r| &mut r.recruits);
        tally(&c.leavers, |r| &mut r.turnover);
    }

    let mut total = MobilitySummary::new(UdaCode::from("Total"));
    let rows: Vec<MobilitySummary> = rows
        .into_values()
        .map(|mut r| {
            r.total_mobility = r.recruits + r.turnover;
            total.incumbents += r.incumbents;
            total.recruits += r.recruits;
            total.turnover += r.turnover;
            r
        })
        .collect();
    total.total_mobility = total.recruits + total.turnover;
    MobilityTable { rows, total }
}
