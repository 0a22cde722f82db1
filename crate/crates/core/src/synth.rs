//! Seeded synthetic faculty systems: yearly rosters with hires, transfers and
//! exits, and a publication corpus with heavy-tailed citations.
//!
//! The generator is ChaCha8 seeded from `seed` and draws in a fixed order, so
//! the same spec always produces the same bytes with this implementation.
//!
//! Each researcher-year, an active researcher leaves the system with
//! probability `exit_rate`, otherwise moves to another university with
//! probability `transfer_rate`, and brings in one new entrant with
//! probability `hire_rate`. Lead publications per researcher-year are Poisson
//! with mean `pubs_per_researcher_year` times a log-normal personal factor
//! times the multiplier of the current university. Co-authors come from the
//! same field, half of them from the same university when possible, with a
//! share of external authors. Citations are zero with probability
//! `uncited_share`, otherwise log-series distributed.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AuthorSlot, CategoryCode, Dataset, DatasetPaths, IssueLog, PubId, Publication, Rank,
    ResearcherId, RosterEntry, SdsCode, UdaCode, UniversityId, AUTHORSHIP_COLUMNS,
    PUBLICATION_COLUMNS, ROSTER_COLUMNS,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CitationModel {
    /// Probability that a publication is never cited.
    pub uncited_share: f64,
    /// Log-series parameter in (0, 1); larger means a heavier tail.
    pub log_series_p: f64,
}

impl Default for CitationModel {
    fn default() -> Self {
        Self {
            uncited_share: 0.25,
            log_series_p: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_universities: usize,
    pub n_sds: usize,
    pub n_udas: usize,
    pub n_categories: usize,
    /// Researchers on the first roster year.
    pub n_researchers: usize,
    pub period_start: i32,
    pub period_end: i32,
    /// Roster years simulated before the period.
    pub pre_period_years: u32,
    pub hire_rate: f64,
    pub transfer_rate: f64,
    pub exit_rate: f64,
    /// Publication-rate multiplier per university id; missing ids get 1.
    pub productivity_profile: BTreeMap<UniversityId, f64>,
    /// Relative headcount per university, in id order; empty for equal sizes.
    pub university_sizes: Vec<f64>,
    pub citation_model: CitationModel,
    pub pubs_per_researcher_year: f64,
    pub max_authors: usize,
    pub multi_category_share: f64,
    /// Share of co-authors outside the roster.
    pub external_author_share: f64,
    /// The last this-many fields publish at a twentieth of the usual rate.
    pub non_bibliometric_sds: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            n_universities: 5,
            n_sds: 4,
            n_udas: 2,
            n_categories: 6,
            n_researchers: 400,
            period_start: 2004,
            period_end: 2008,
            pre_period_years: 1,
            hire_rate: 0.06,
            transfer_rate: 0.03,
            exit_rate: 0.04,
            productivity_profile: BTreeMap::new(),
            university_sizes: Vec::new(),
            citation_model: CitationModel::default(),
            pubs_per_researcher_year: 1.0,
            max_authors: 12,
            multi_category_share: 0.2,
            external_author_share: 0.15,
            non_bibliometric_sds: 0,
        }
    }
}

fn id(prefix: &str, i: usize, count: usize) -> String {
    let width = count.max(10).to_string().len().max(2);
    format!("{prefix}{:0width$}", i + 1)
}

impl SynthSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn university_id(&self, i: usize) -> UniversityId {
        UniversityId::new(id("U", i, self.n_universities))
    }

    pub fn university_ids(&self) -> Vec<UniversityId> {
        (0..self.n_universities)
            .map(|i| self.university_id(i))
            .collect()
    }

    pub fn sds_code(&self, i: usize) -> SdsCode {
        SdsCode::new(id("S", i, self.n_sds))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, n) in [
            ("n_universities", self.n_universities),
            ("n_sds", self.n_sds),
            ("n_udas", self.n_udas),
            ("n_categories", self.n_categories),
            ("n_researchers", self.n_researchers),
            ("max_authors", self.max_authors),
        ] {
            if n == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.n_udas > self.n_sds {
            return bad("n_udas cannot exceed n_sds".into());
        }
        if self.non_bibliometric_sds > self.n_sds {
            return bad("non_bibliometric_sds cannot exceed n_sds".into());
        }
        if self.period_end < self.period_start {
            return bad("period_end precedes period_start".into());
        }
        for (name, p) in [
            ("hire_rate", self.hire_rate),
            ("transfer_rate", self.transfer_rate),
            ("exit_rate", self.exit_rate),
            ("multi_category_share", self.multi_category_share),
            ("external_author_share", self.external_author_share),
            (
                "citation_model.uncited_share",
                self.citation_model.uncited_share,
            ),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.exit_rate + self.transfer_rate > 1.0 {
            return bad("exit_rate + transfer_rate exceeds 1".into());
        }
        let p = self.citation_model.log_series_p;
        if !(p > 0.0 && p < 1.0) {
            return bad(format!(
                "citation_model.log_series_p must lie in (0, 1), got {p}"
            ));
        }
        if self.transfer_rate > 0.0 && self.n_universities < 2 {
            return bad("transfers need at least 2 universities".into());
        }
        if self.multi_category_share > 0.0 && self.n_categories < 2 {
            return bad("multi-category publications need at least 2 categories".into());
        }
        if !(self.pubs_per_researcher_year.is_finite() && self.pubs_per_researcher_year >= 0.0) {
            return bad("pubs_per_researcher_year must be non-negative".into());
        }
        let known = self.university_ids();
        for (u, m) in &self.productivity_profile {
            if !known.contains(u) {
                return bad(format!("productivity_profile names unknown university {u}"));
            }
            if !(m.is_finite() && *m > 0.0) {
                return bad(format!("productivity multiplier for {u} must be positive"));
            }
        }
        if !self.university_sizes.is_empty() {
            if self.university_sizes.len() != self.n_universities {
                return bad(format!(
                    "university_sizes has {} entries for {} universities",
                    self.university_sizes.len(),
                    self.n_universities
                ));
            }
            if self
                .university_sizes
                .iter()
                .any(|s| !(s.is_finite() && *s > 0.0))
            {
                return bad("university_sizes must be positive".into());
            }
        }
        Ok(())
    }
}

/// Generated records, ready to write or to validate in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub roster: Vec<RosterEntry>,
    pub publications: Vec<Publication>,
}

impl SynthData {
    pub fn to_dataset(&self) -> (Dataset, IssueLog) {
        let period_end = self.roster.iter().map(|e| e.year).max().unwrap_or(0);
        Dataset::from_records(self.roster.clone(), self.publications.clone(), period_end)
    }

    /// Writes `roster.csv`, `publications.csv` and `authorships.csv`.
    pub fn write_csv(&self, dir: &Path) -> Result<DatasetPaths> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = DatasetPaths::in_dir(dir);

        let mut w = writer(&paths.roster)?;
        w.write_record(ROSTER_COLUMNS)?;
        for e in &self.roster {
            w.write_record([
                e.researcher_id.as_str(),
                &e.year.to_string(),
                e.university_id.as_str(),
                e.sds_code.as_str(),
                e.uda_code.as_str(),
                e.rank.as_str(),
            ])?;
        }
        finish(w, &paths.roster)?;

        let mut w = writer(&paths.publications)?;
        w.write_record(PUBLICATION_COLUMNS)?;
        for p in &self.publications {
            let categories: Vec<&str> = p.subject_categories.iter().map(|c| c.as_str()).collect();
            w.write_record([
                p.pub_id.as_str(),
                &p.year.to_string(),
                &p.citations.to_string(),
                &categories.join(";"),
            ])?;
        }
        finish(w, &paths.publications)?;

        let mut w = writer(&paths.authorships)?;
        w.write_record(AUTHORSHIP_COLUMNS)?;
        for p in &self.publications {
            for s in &p.authors {
                w.write_record([
                    p.pub_id.as_str(),
                    &s.position.to_string(),
                    s.university_id.as_ref().map_or("", |u| u.as_str()),
                    s.researcher_id.as_ref().map_or("", |r| r.as_str()),
                ])?;
            }
        }
        finish(w, &paths.authorships)?;
        Ok(paths)
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Generates and writes a dataset into `out_dir`.
pub fn generate(spec: &SynthSpec, out_dir: &Path) -> Result<DatasetPaths> {
    simulate(spec)?.write_csv(out_dir)
}

struct Person {
    id: ResearcherId,
    university: usize,
    sds: usize,
    rank: Rank,
    talent: f64,
    active: bool,
}

/// Draws from the log-series distribution (Kemp's second algorithm).
fn log_series(rng: &mut impl Rng, p: f64) -> u64 {
    let v: f64 = rng.random();
    if v >= p {
        return 1;
    }
    let u: f64 = rng.random();
    let q = 1.0 - (u * (1.0 - p).ln()).exp();
    if v <= q * q {
        let k = 1.0 + v.ln() / q.ln();
        return if k.is_finite() {
            k.floor().max(1.0) as u64
        } else {
            1
        };
    }
    if v >= q {
        1
    } else {
        2
    }
}

fn pick_weighted(rng: &mut impl Rng, cumulative: &[f64]) -> usize {
    let total = *cumulative.last().expect("non-empty weights");
    let x = rng.random::<f64>() * total;
    cumulative
        .partition_point(|c| *c <= x)
        .min(cumulative.len() - 1)
}

fn initial_rank(rng: &mut impl Rng) -> Rank {
    match rng.random_range(0..20) {
        0..=6 => Rank::Assistant,
        7..=13 => Rank::Associate,
        _ => Rank::Full,
    }
}

pub fn simulate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let first_year = spec.period_start - spec.pre_period_years as i32;

    let universities = spec.university_ids();
    let sds_codes: Vec<SdsCode> = (0..spec.n_sds).map(|i| spec.sds_code(i)).collect();
    let uda_of = |sds: usize| UdaCode::new(id("A", sds % spec.n_udas, spec.n_udas));
    let home_category = |sds: usize| sds % spec.n_categories;
    let categories: Vec<CategoryCode> = (0..spec.n_categories)
        .map(|i| CategoryCode::new(id("C", i, spec.n_categories)))
        .collect();
    let multiplier: Vec<f64> = universities
        .iter()
        .map(|u| spec.productivity_profile.get(u).copied().unwrap_or(1.0))
        .collect();
    let sizes = if spec.university_sizes.is_empty() {
        vec![1.0; spec.n_universities]
    } else {
        spec.university_sizes.clone()
    };
    let cumulative: Vec<f64> = sizes
        .iter()
        .scan(0.0, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    let talent = LogNormal::new(0.0, 0.5).expect("valid log-normal");
    let quiet = spec.n_sds - spec.non_bibliometric_sds;

    let mut people: Vec<Person> = Vec::new();
    let mut next_id = 0usize;
    let id_width = (spec.n_researchers * 4).max(100);
    let mut new_person = |rng: &mut ChaCha8Rng, people: &mut Vec<Person>, rank: Rank| {
        let university = pick_weighted(rng, &cumulative);
        let sds = rng.random_range(0..spec.n_sds);
        people.push(Person {
            id: ResearcherId::new(id("R", next_id, id_width)),
            university,
            sds,
            rank,
            talent: talent.sample(rng),
            active: true,
        });
        next_id += 1;
    };
    for _ in 0..spec.n_researchers {
        let rank = initial_rank(&mut rng);
        new_person(&mut rng, &mut people, rank);
    }

    let mut roster = Vec::new();
    let mut publications = Vec::new();
    for year in first_year..=spec.period_end {
        if year > first_year {
            let mut hires = 0;
            for person in people.iter_mut() {
                if !person.active {
                    continue;
                }
                let x: f64 = rng.random();
                if x < spec.exit_rate {
                    person.active = false;
                    continue;
                }
                if x < spec.exit_rate + spec.transfer_rate {
                    let from = person.university;
                    let mut to = pick_weighted(&mut rng, &cumulative);
                    while to == from {
                        to = rng.random_range(0..spec.n_universities);
                    }
                    person.university = to;
                }
                let promote: f64 = rng.random();
                person.rank = match person.rank {
                    Rank::Assistant if promote < 0.06 => Rank::Associate,
                    Rank::Associate if promote < 0.04 => Rank::Full,
                    r => r,
                };
                if rng.random::<f64>() < spec.hire_rate {
                    hires += 1;
                }
            }
            for _ in 0..hires {
                let rank = if rng.random_range(0..5) == 0 {
                    Rank::Associate
                } else {
                    Rank::Assistant
                };
                new_person(&mut rng, &mut people, rank);
            }
        }

        let active: Vec<usize> = (0..people.len()).filter(|&i| people[i].active).collect();
        for &i in &active {
            let p = &people[i];
            roster.push(RosterEntry {
                researcher_id: p.id.clone(),
                year,
                university_id: universities[p.university].clone(),
                sds_code: sds_codes[p.sds].clone(),
                uda_code: uda_of(p.sds),
                rank: p.rank,
            });
        }
        if year < spec.period_start {
            continue;
        }

        let mut by_sds: Vec<Vec<usize>> = vec![Vec::new(); spec.n_sds];
        let mut by_sds_uni: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for &i in &active {
            by_sds[people[i].sds].push(i);
            by_sds_uni
                .entry((people[i].sds, people[i].university))
                .or_default()
                .push(i);
        }

        for &lead in &active {
            let p = &people[lead];
            let mut rate = spec.pubs_per_researcher_year * p.talent * multiplier[p.university];
            if p.sds >= quiet {
                rate *= 0.05;
            }
            let n_pubs = if rate > 0.0 {
                Poisson::new(rate).expect("positive rate").sample(&mut rng) as usize
            } else {
                0
            };
            for _ in 0..n_pubs {
                let n_authors = rng.random_range(1..=spec.max_authors);
                let mut members: Vec<Option<usize>> = vec![Some(lead)];
                let mut external_unis = Vec::new();
                while members.len() < n_authors {
                    if rng.random::<f64>() < spec.external_author_share {
                        members.push(None);
                        external_unis.push(rng.random_range(0..spec.n_universities));
                        continue;
                    }
                    let same_uni = rng.random::<bool>();
                    let pool = if same_uni {
                        &by_sds_uni[&(p.sds, p.university)]
                    } else {
                        &by_sds[p.sds]
                    };
                    let candidate = *pool.choose(&mut rng).expect("pool holds the lead author");
                    if members.contains(&Some(candidate)) {
                        members.push(None);
                        external_unis.push(rng.random_range(0..spec.n_universities));
                    } else {
                        members.push(Some(candidate));
                    }
                }
                // Shuffle byline order.
                for k in (1..members.len()).rev() {
                    let j = rng.random_range(0..=k);
                    members.swap(k, j);
                }
                let mut external = external_unis.into_iter();
                let authors = members
                    .iter()
                    .enumerate()
                    .map(|(pos, m)| match m {
                        Some(i) => AuthorSlot {
                            position: pos as u32 + 1,
                            university_id: Some(universities[people[*i].university].clone()),
                            researcher_id: Some(people[*i].id.clone()),
                        },
                        None => AuthorSlot {
                            position: pos as u32 + 1,
                            university_id: Some(
                                universities[external.next().expect("one draw per external")]
                                    .clone(),
                            ),
                            researcher_id: None,
                        },
                    })
                    .collect();

                let mut cats = vec![categories[home_category(p.sds)].clone()];
                if rng.random::<f64>() < spec.multi_category_share {
                    let mut other = rng.random_range(0..spec.n_categories - 1);
                    if other >= home_category(p.sds) {
                        other += 1;
                    }
                    cats.push(categories[other].clone());
                    cats.sort();
                }
                let citations = if rng.random::<f64>() < spec.citation_model.uncited_share {
                    0
                } else {
                    log_series(&mut rng, spec.citation_model.log_series_p)
                };
                let n = publications.len();
                publications.push(Publication {
                    pub_id: PubId::new(id("P", n, 10_000_000)),
                    year,
                    citations,
                    subject_categories: cats,
                    authors,
                });
            }
        }
    }
    roster.sort_by(|a, b| (&a.researcher_id, a.year).cmp(&(&b.researcher_id, b.year)));
    Ok(SynthData {
        roster,
        publications,
    })
}
