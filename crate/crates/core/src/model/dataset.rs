use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::Range;

use super::issues::IssueLog;
use super::types::*;

/// Link from a researcher to one byline slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Authorship {
    /// Index into [`Dataset::publications`].
    pub publication: usize,
    /// Index into that publication's `authors`.
    pub slot: usize,
}

/// Immutable, cross-referenced roster and publication corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    roster: Vec<RosterEntry>,
    publications: Vec<Publication>,
    careers: BTreeMap<ResearcherId, Range<usize>>,
    authorships: HashMap<ResearcherId, Vec<Authorship>>,
}

impl Dataset {
    /// Builds indexes over records that already passed validation.
    fn assemble(mut roster: Vec<RosterEntry>, mut publications: Vec<Publication>) -> Self {
        roster.sort_by(|a, b| (&a.researcher_id, a.year).cmp(&(&b.researcher_id, b.year)));
        publications.sort_by(|a, b| a.pub_id.cmp(&b.pub_id));

        let mut careers = BTreeMap::new();
        let mut start = 0;
        for i in 1..=roster.len() {
            if i == roster.len() || roster[i].researcher_id != roster[start].researcher_id {
                careers.insert(roster[start].researcher_id.clone(), start..i);
                start = i;
            }
        }

        let mut authorships: HashMap<ResearcherId, Vec<Authorship>> = HashMap::new();
        for (p, publication) in publications.iter().enumerate() {
            for (s, slot) in publication.authors.iter().enumerate() {
                if let Some(id) = &slot.researcher_id {
                    authorships.entry(id.clone()).or_default().push(Authorship {
                        publication: p,
                        slot: s,
                    });
                }
            }
        }

        Self {
            roster,
            publications,
            careers,
            authorships,
        }
    }

    /// Validates in-memory records with the same cross-reference rules the
    /// CSV loader applies. Invalid records are dropped from the dataset.
    pub fn from_records(
        roster: Vec<RosterEntry>,
        publications: Vec<Publication>,
        period_end: i32,
    ) -> (Self, IssueLog) {
        let mut raw = RawRecords::default();
        for entry in roster {
            let locus = format!("roster {}/{}", entry.researcher_id, entry.year);
            raw.roster.push((locus, entry));
        }
        for mut publication in publications {
            let locus = format!("publication {}", publication.pub_id);
            for slot in std::mem::take(&mut publication.authors) {
                raw.slots
                    .push((locus.clone(), publication.pub_id.clone(), slot));
            }
            raw.publications.push((locus, publication));
        }
        raw.cross_reference(period_end)
    }

    pub fn roster(&self) -> &[RosterEntry] {
        &self.roster
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn n_researchers(&self) -> usize {
        self.careers.len()
    }

    /// Researchers with their roster years, ordered by id then year.
    pub fn careers(&self) -> impl Iterator<Item = (&ResearcherId, &[RosterEntry])> + '_ {
        self.careers
            .iter()
            .map(move |(id, range)| (id, &self.roster[range.clone()]))
    }

    pub fn career(&self, id: &ResearcherId) -> &[RosterEntry] {
        self.careers
            .get(id)
            .map(|range| &self.roster[range.clone()])
            .unwrap_or(&[])
    }

    pub fn authorships(&self, id: &ResearcherId) -> &[Authorship] {
        self.authorships.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn universities(&self) -> BTreeSet<&UniversityId> {
        self.roster.iter().map(|e| &e.university_id).collect()
    }

    /// Earliest roster year in the whole corpus; years before it are unobserved.
    pub fn first_roster_year(&self) -> Option<i32> {
        self.roster.iter().map(|e| e.year).min()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty() && self.publications.is_empty()
    }
}

/// Where a researcher stands over an assessment period. Field, area, rank and
/// university are those of the last roster year inside the period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodProfile {
    pub researcher_id: ResearcherId,
    pub university_id: UniversityId,
    pub sds_code: SdsCode,
    pub uda_code: UdaCode,
    pub rank: Rank,
    /// Distinct roster years inside the period.
    pub service_years: u32,
}

pub fn period_profile(career: &[RosterEntry], period: Period) -> Option<PeriodProfile> {
    let mut in_period = career.iter().filter(|e| period.contains(e.year));
    let first = in_period.next()?;
    let mut last = first;
    let mut years = 1;
    for entry in in_period {
        last = entry;
        years += 1;
    }
    Some(PeriodProfile {
        researcher_id: last.researcher_id.clone(),
        university_id: last.university_id.clone(),
        sds_code: last.sds_code.clone(),
        uda_code: last.uda_code.clone(),
        rank: last.rank,
        service_years: years,
    })
}

/// Profiles of every researcher present in the period, ordered by id.
pub fn period_profiles(dataset: &Dataset, period: Period) -> Vec<PeriodProfile> {
    dataset
        .careers()
        .filter_map(|(_, career)| period_profile(career, period))
        .collect()
}

/// Records before cross-referencing, each tagged with where it came from.
#[derive(Debug, Default)]
pub(crate) struct RawRecords {
    pub roster: Vec<(String, RosterEntry)>,
    /// Publications with an empty author list; slots arrive separately.
    pub publications: Vec<(String, Publication)>,
    pub slots: Vec<(String, PubId, AuthorSlot)>,
}

impl RawRecords {
    pub fn cross_reference(self, period_end: i32) -> (Dataset, IssueLog) {
        let mut issues = IssueLog::new();

        let mut seen = HashSet::new();
        let mut roster = Vec::with_capacity(self.roster.len());
        for (locus, entry) in self.roster {
            if entry.year > period_end {
                issues.warning(
                    locus,
                    format!(
                        "roster year {} is after the period end {period_end}; row ignored",
                        entry.year
                    ),
                );
                continue;
            }
            if !seen.insert((entry.researcher_id.clone(), entry.year)) {
                issues.error(
                    locus,
                    format!(
                        "duplicate roster entry for researcher {} in {}",
                        entry.researcher_id, entry.year
                    ),
                );
                continue;
            }
            roster.push(entry);
        }
        let known_researchers: HashSet<&ResearcherId> =
            roster.iter().map(|e| &e.researcher_id).collect();

        let mut publications: BTreeMap<PubId, (String, Publication)> = BTreeMap::new();
        for (locus, publication) in self.publications {
            if publications.contains_key(&publication.pub_id) {
                issues.error(locus, format!("duplicate pub_id {}", publication.pub_id));
                continue;
            }
            publications.insert(publication.pub_id.clone(), (locus, publication));
        }

        let mut slots: BTreeMap<PubId, Vec<(String, AuthorSlot)>> = BTreeMap::new();
        for (locus, pub_id, slot) in self.slots {
            if !publications.contains_key(&pub_id) {
                issues.error(
                    locus,
                    format!("authorship references unknown pub_id {pub_id}"),
                );
                continue;
            }
            if let Some(id) = &slot.researcher_id {
                if !known_researchers.contains(id) {
                    issues.error(
                        locus,
                        format!("authorship references researcher {id} absent from the roster"),
                    );
                    continue;
                }
            }
            slots.entry(pub_id).or_default().push((locus, slot));
        }

        let mut accepted = Vec::with_capacity(publications.len());
        for (pub_id, (locus, mut publication)) in publications {
            let mut pub_slots = slots.remove(&pub_id).unwrap_or_default();
            if pub_slots.is_empty() {
                issues.error(locus, format!("publication {pub_id} has no authors"));
                continue;
            }
            pub_slots.sort_by_key(|(_, s)| s.position);
            let n = pub_slots.len();
            let mut ok = true;
            for (expected, (slot_locus, slot)) in (1u32..).zip(&pub_slots) {
                if slot.position != expected {
                    issues.error(
                        slot_locus.clone(),
                        format!(
                            "author position {} on publication {pub_id} with {n} author(s); positions must run 1..{n}",
                            slot.position
                        ),
                    );
                    ok = false;
                    break;
                }
            }
            let mut researchers = HashSet::new();
            for (slot_locus, slot) in &pub_slots {
                if let Some(id) = &slot.researcher_id {
                    if !researchers.insert(id) {
                        issues.error(
                            slot_locus.clone(),
                            format!("researcher {id} appears twice on publication {pub_id}"),
                        );
                        ok = false;
                    }
                }
            }
            if ok {
                publication.authors = pub_slots.into_iter().map(|(_, s)| s).collect();
                accepted.push(publication);
            }
        }

        (Dataset::assemble(roster, accepted), issues)
    }
}

/// Outcome of the "at least half of the field publishes" test.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdsClassification {
    pub bibliometric: BTreeSet<SdsCode>,
    /// Per field: (professors in the period, professors with at least one publication).
    pub counts: BTreeMap<SdsCode, (usize, usize)>,
}

/// Fields in which at least `bibliometric_share` of the professors present in
/// the period have one or more publications dated inside the period.
pub fn classify_bibliometric_sds(
    dataset: &Dataset,
    config: &AssessmentConfig,
) -> (SdsClassification, IssueLog) {
    let period = config.period();
    let mut issues = IssueLog::new();
    let mut counts: BTreeMap<SdsCode, (usize, usize)> = BTreeMap::new();

    for (id, career) in dataset.careers() {
        let Some(profile) = period_profile(career, period) else {
            continue;
        };
        let published = dataset
            .authorships(id)
            .iter()
            .any(|a| period.contains(dataset.publications()[a.publication].year));
        let entry = counts.entry(profile.sds_code).or_default();
        entry.0 += 1;
        if published {
            entry.1 += 1;
        }
    }

    let all_codes: BTreeSet<&SdsCode> = dataset.roster().iter().map(|e| &e.sds_code).collect();
    for code in all_codes {
        if !counts.contains_key(code) {
            issues.warning(
                format!("sds {code}"),
                "no professors assigned to this field in the period; excluded",
            );
        }
    }

    let bibliometric = counts
        .iter()
        .filter(|(_, (professors, publishing))| {
            *professors > 0
                && (*publishing as f64) >= config.bibliometric_share * (*professors as f64)
        })
        .map(|(code, _)| code.clone())
        .collect();

    (
        SdsClassification {
            bibliometric,
            counts,
        },
        issues,
    )
}

/// Keeps the careers of researchers assigned to a bibliometric field and the
/// publications they authored. Bylines stay complete so credit shares are
/// unaffected; links to dropped researchers become untracked slots.
pub fn restrict_to_bibliometric(
    dataset: &Dataset,
    bibliometric: &BTreeSet<SdsCode>,
    period: Period,
) -> (Dataset, IssueLog) {
    let mut issues = IssueLog::new();
    if bibliometric.is_empty() {
        issues.warning(
            "dataset",
            "no bibliometric fields; the restricted dataset is empty",
        );
        return (Dataset::default(), issues);
    }

    let mut kept: HashSet<&ResearcherId> = HashSet::new();
    let mut roster = Vec::new();
    for (id, career) in dataset.careers() {
        let Some(profile) = period_profile(career, period) else {
            continue;
        };
        if bibliometric.contains(&profile.sds_code) {
            kept.insert(id);
            roster.extend_from_slice(career);
        }
    }

    let publications = dataset
        .publications()
        .iter()
        .filter(|p| {
            p.authors
                .iter()
                .any(|s| s.researcher_id.as_ref().is_some_and(|id| kept.contains(id)))
        })
        .map(|p| {
            let mut p = p.clone();
            for slot in &mut p.authors {
                if slot
                    .researcher_id
                    .as_ref()
                    .is_some_and(|id| !kept.contains(id))
                {
                    slot.researcher_id = None;
                }
            }
            p
        })
        .collect();

    let restricted = Dataset::assemble(roster, publications);
    if restricted.is_empty() {
        issues.warning(
            "dataset",
            "restriction to bibliometric fields left no records",
        );
    }
    (restricted, issues)
}
