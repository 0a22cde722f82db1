//! Brute-force recomputation of the fixture results, written against the
//! definitions only. Shares no code with the library: files are split by
//! hand and every quantity is a loop over the raw rows.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct Row {
    pub id: String,
    pub year: i32,
    pub uni: String,
    pub sds: String,
    pub rank: String,
}

#[derive(Debug, Clone)]
pub struct Paper {
    pub id: String,
    pub year: i32,
    pub cites: f64,
    pub cats: Vec<String>,
    /// (affiliation, researcher) in byline order; empty strings for blanks.
    pub byline: Vec<(String, String)>,
}

pub struct Inputs {
    pub roster: Vec<Row>,
    pub papers: Vec<Paper>,
    pub start: i32,
    pub end: i32,
    pub weights: BTreeMap<String, f64>,
    pub positional_fields: BTreeSet<String>,
    pub min_group: usize,
    pub min_service: usize,
}

fn lines(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect()
}

impl Inputs {
    /// Reads the three CSV files of `dir` with the given run parameters.
    pub fn read(
        dir: &Path,
        start: i32,
        end: i32,
        weights: [(&str, f64); 3],
        positional: &[&str],
        min_group: usize,
    ) -> Self {
        let roster = lines(&dir.join("roster.csv"))
            .into_iter()
            .map(|f| Row {
                id: f[0].clone(),
                year: f[1].parse().unwrap(),
                uni: f[2].clone(),
                sds: f[3].clone(),
                rank: f[5].clone(),
            })
            .collect();
        let mut papers: Vec<Paper> = lines(&dir.join("publications.csv"))
            .into_iter()
            .map(|f| Paper {
                id: f[0].clone(),
                year: f[1].parse().unwrap(),
                cites: f[2].parse().unwrap(),
                cats: f[3].split(';').map(String::from).collect(),
                byline: Vec::new(),
            })
            .collect();
        let mut slots = lines(&dir.join("authorships.csv"));
        slots.sort_by_key(|f| (f[0].clone(), f[1].parse::<u32>().unwrap()));
        for f in slots {
            let p = papers.iter_mut().find(|p| p.id == f[0]).unwrap();
            p.byline
                .push((f[2].clone(), f.get(3).cloned().unwrap_or_default()));
        }
        Inputs {
            roster,
            papers,
            start,
            end,
            weights: weights.iter().map(|(r, w)| (r.to_string(), *w)).collect(),
            positional_fields: positional.iter().map(|s| s.to_string()).collect(),
            min_group,
            min_service: 3,
        }
    }

    fn in_period(&self, y: i32) -> bool {
        self.start <= y && y <= self.end
    }

    fn rows_of(&self, id: &str) -> Vec<&Row> {
        let mut r: Vec<&Row> = self.roster.iter().filter(|r| r.id == id).collect();
        r.sort_by_key(|r| r.year);
        r
    }

    fn last_period_row(&self, id: &str) -> Option<&Row> {
        self.rows_of(id)
            .into_iter()
            .rev()
            .find(|r| self.in_period(r.year))
    }

    fn ids(&self) -> BTreeSet<String> {
        self.roster.iter().map(|r| r.id.clone()).collect()
    }
}

/// Byline shares for one publication seen by an author of `field`.
fn shares(inputs: &Inputs, paper: &Paper, field: &str) -> Vec<f64> {
    let n = paper.byline.len();
    let equal = vec![1.0 / n as f64; n];
    if !inputs.positional_fields.contains(field) || n == 1 {
        return equal;
    }
    let first = &paper.byline[0].0;
    let last = &paper.byline[n - 1].0;
    if first.is_empty() || last.is_empty() {
        return equal;
    }
    let raw: Vec<f64> = if first == last {
        // 40 / 20 / 40
        match n {
            2 => vec![0.4, 0.4],
            _ => (0..n)
                .map(|i| {
                    if i == 0 || i == n - 1 {
                        0.4
                    } else {
                        0.2 / (n - 2) as f64
                    }
                })
                .collect(),
        }
    } else {
        // 30 / 15 / 10 / 15 / 30, overlapping roles adding up
        match n {
            2 => vec![0.45, 0.45],
            3 => vec![0.3, 0.3, 0.3],
            4 => vec![0.3, 0.15, 0.15, 0.3],
            _ => (0..n)
                .map(|i| {
                    if i == 0 || i == n - 1 {
                        0.3
                    } else if i == 1 || i == n - 2 {
                        0.15
                    } else {
                        0.1 / (n - 4) as f64
                    }
                })
                .collect(),
        }
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

#[derive(Debug, Default)]
pub struct Expected {
    pub fss: BTreeMap<String, f64>,
    /// University to its twelve indicator values (R, T, M families).
    pub indicators: BTreeMap<String, [Option<f64>; 12]>,
    pub total: [Option<f64>; 12],
    pub eligible: BTreeSet<String>,
    pub university_productivity: BTreeMap<String, f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn smallest_positive(v: &[f64]) -> Option<f64> {
    v.iter().copied().filter(|x| *x > 0.0).reduce(f64::min)
}

pub fn compute(inputs: &Inputs) -> Expected {
    let ids = inputs.ids();

    // Professors of the period and their field; fields where half publish.
    let mut field_of = BTreeMap::new();
    for id in &ids {
        if let Some(r) = inputs.last_period_row(id) {
            field_of.insert(id.clone(), r.sds.clone());
        }
    }
    let mut profs: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (id, f) in &field_of {
        let published = inputs
            .papers
            .iter()
            .any(|p| inputs.in_period(p.year) && p.byline.iter().any(|s| &s.1 == id));
        let e = profs.entry(f).or_default();
        e.0 += 1;
        e.1 += published as usize;
    }
    let scored: BTreeSet<String> = field_of
        .iter()
        .filter(|(_, f)| {
            let (n, k) = profs[f.as_str()];
            2 * k >= n
        })
        .map(|(id, _)| id.clone())
        .collect();

    // Scaled citations.
    let baseline = |year: i32, cat: &str| -> Option<f64> {
        let c: Vec<f64> = inputs
            .papers
            .iter()
            .filter(|p| {
                p.year == year
                    && p.cites > 0.0
                    && inputs.in_period(p.year)
                    && p.cats.iter().any(|c| c == cat)
            })
            .map(|p| p.cites)
            .collect();
        mean(&c)
    };
    let scaled = |p: &Paper| -> f64 {
        if p.cites == 0.0 {
            return 0.0;
        }
        let b: Vec<f64> = p.cats.iter().filter_map(|c| baseline(p.year, c)).collect();
        p.cites / mean(&b).unwrap()
    };

    let mut out = Expected::default();
    let mut last_row = BTreeMap::new();
    for id in &scored {
        let rows = inputs.rows_of(id);
        let years: BTreeSet<i32> = rows
            .iter()
            .map(|r| r.year)
            .filter(|y| inputs.in_period(*y))
            .collect();
        let field = &field_of[id];
        let mut sum = 0.0;
        for p in inputs.papers.iter().filter(|p| inputs.in_period(p.year)) {
            for (k, slot) in p.byline.iter().enumerate() {
                if &slot.1 == id {
                    sum += scaled(p) * shares(inputs, p, field)[k];
                }
            }
        }
        out.fss.insert(id.clone(), sum / years.len() as f64);
        last_row.insert(id.clone(), inputs.last_period_row(id).unwrap().clone());
    }
    let rel = |rank: &str| inputs.weights[rank] / inputs.weights["assistant"];

    // Mobility events from the full roster.
    let observed = inputs.roster.iter().map(|r| r.year).min().unwrap();
    // (researcher, kind, year, origin, destination)
    let mut events: Vec<(String, &str, i32, String, String)> = Vec::new();
    for id in &ids {
        let rows = inputs.rows_of(id);
        if rows[0].year > observed {
            events.push((
                id.clone(),
                "in",
                rows[0].year,
                String::new(),
                rows[0].uni.clone(),
            ));
        }
        for w in rows.windows(2) {
            if w[1].year - w[0].year >= 3 {
                events.push((
                    id.clone(),
                    "out",
                    w[0].year + 1,
                    w[0].uni.clone(),
                    String::new(),
                ));
                events.push((id.clone(), "in", w[1].year, String::new(), w[1].uni.clone()));
            } else if w[0].uni != w[1].uni {
                events.push((
                    id.clone(),
                    "move",
                    w[1].year,
                    w[0].uni.clone(),
                    w[1].uni.clone(),
                ));
            }
        }
    }
    events.retain(|e| inputs.in_period(e.2) && scored.contains(&e.0));

    let rank_in = |id: &str, year: i32| -> String {
        inputs
            .rows_of(id)
            .iter()
            .find(|r| r.year == year)
            .unwrap()
            .rank
            .clone()
    };
    let rank_before = |id: &str, year: i32| -> String {
        inputs
            .rows_of(id)
            .iter()
            .rev()
            .find(|r| r.year < year)
            .unwrap()
            .rank
            .clone()
    };

    // Cohorts.
    let unis: BTreeSet<String> = inputs
        .roster
        .iter()
        .filter(|r| inputs.in_period(r.year) && scored.contains(&r.id))
        .map(|r| r.uni.clone())
        .collect();
    struct Cohort {
        incumbents: Vec<(String, String)>,
        recruits: Vec<(String, String)>,
        leavers: Vec<(String, String)>,
    }
    let mut cohorts: BTreeMap<String, Cohort> = BTreeMap::new();
    for u in &unis {
        let mut recruits: Vec<(String, String)> = Vec::new();
        for e in events.iter().filter(|e| &e.4 == u) {
            let stay = inputs
                .rows_of(&e.0)
                .iter()
                .filter(|r| r.year >= e.2 && r.year <= inputs.end && &r.uni == u)
                .count();
            if stay >= inputs.min_service && !recruits.iter().any(|r| r.0 == e.0) {
                recruits.push((e.0.clone(), rank_in(&e.0, e.2)));
            }
        }
        let mut leavers: Vec<(String, String)> = Vec::new();
        for e in events.iter().filter(|e| e.1 == "move" && &e.3 == u) {
            if !leavers.iter().any(|r| r.0 == e.0) {
                leavers.push((e.0.clone(), rank_before(&e.0, e.2)));
            }
        }
        let incumbents = inputs
            .roster
            .iter()
            .filter(|r| r.year == inputs.start && &r.uni == u && scored.contains(&r.id))
            .filter(|r| !recruits.iter().any(|x| x.0 == r.id))
            .map(|r| (r.id.clone(), r.rank.clone()))
            .collect();
        cohorts.insert(
            u.clone(),
            Cohort {
                incumbents,
                recruits,
                leavers,
            },
        );
    }

    // One person's four outcomes: internal ratio, internal win, external
    // ratio, external win.
    let person = |u: &str, id: &str, rank: &str, leaver: bool| -> [Option<f64>; 4] {
        let field = &field_of[id];
        let fss = out.fss[id];
        let own_norm = fss / rel(rank);
        let pool: Vec<f64> = cohorts[u]
            .incumbents
            .iter()
            .filter(|(i, _)| &field_of[i] == field && !(leaver && i == id))
            .map(|(i, r)| out.fss[i] / rel(r))
            .collect();
        let national_norm: Vec<f64> = scored
            .iter()
            .filter(|i| &field_of[*i] == field)
            .map(|i| out.fss[i] / rel(&last_row[i].rank))
            .collect();
        let external: Vec<f64> = scored
            .iter()
            .filter(|i| &field_of[*i] == field && last_row[*i].rank == rank)
            .map(|i| out.fss[i])
            .collect();
        let ratio = |own: f64, avg: f64, eps_from: &[f64]| -> Option<f64> {
            let (num, den) = if leaver { (avg, own) } else { (own, avg) };
            if den > 0.0 {
                Some(num / den)
            } else {
                smallest_positive(eps_from).map(|e| (num + e) / e)
            }
        };
        let win = |own: f64, avg: f64| -> f64 {
            if (leaver && own < avg) || (!leaver && own > avg) {
                1.0
            } else {
                0.0
            }
        };
        let mut o = [None; 4];
        if let Some(avg) = mean(&pool) {
            let eps_from = if smallest_positive(&pool).is_some() {
                &pool
            } else {
                &national_norm
            };
            o[0] = ratio(own_norm, avg, eps_from);
            o[1] = Some(win(own_norm, avg));
        }
        if let Some(avg) = mean(&external) {
            o[2] = ratio(fss, avg, &external);
            o[3] = Some(win(fss, avg));
        }
        o
    };

    let side = |people: &[(String, [Option<f64>; 4])]| -> ([Option<f64>; 4], [usize; 4]) {
        let mut v = [None; 4];
        let mut n = [0; 4];
        for k in 0..4 {
            let xs: Vec<f64> = people.iter().filter_map(|p| p.1[k]).collect();
            n[k] = xs.len();
            v[k] = mean(&xs);
        }
        (v, n)
    };
    let combine = |r: ([Option<f64>; 4], [usize; 4]),
                   t: ([Option<f64>; 4], [usize; 4])|
     -> [Option<f64>; 12] {
        let mut all = [None; 12];
        for k in 0..4 {
            all[k] = r.0[k];
            all[4 + k] = t.0[k];
            all[8 + k] = match (r.0[k], t.0[k]) {
                (Some(a), Some(b)) => {
                    Some((r.1[k] as f64 * a + t.1[k] as f64 * b) / (r.1[k] + t.1[k]) as f64)
                }
                (a, b) => a.or(b),
            };
        }
        all
    };

    let mut pooled_r = Vec::new();
    let mut pooled_t = Vec::new();
    for (u, c) in &cohorts {
        let r: Vec<(String, [Option<f64>; 4])> = c
            .recruits
            .iter()
            .map(|(id, rank)| (id.clone(), person(u, id, rank, false)))
            .collect();
        let t: Vec<(String, [Option<f64>; 4])> = c
            .leavers
            .iter()
            .map(|(id, rank)| (id.clone(), person(u, id, rank, true)))
            .collect();
        let ok = c.recruits.len() >= inputs.min_group
            && c.leavers.len() >= inputs.min_group
            && c.incumbents.len() >= inputs.min_group;
        if ok {
            out.eligible.insert(u.clone());
            out.indicators
                .insert(u.clone(), combine(side(&r), side(&t)));
        }
        pooled_r.extend(r);
        pooled_t.extend(t);
    }
    out.total = combine(side(&pooled_r), side(&pooled_t));

    // Mean FSS ratio against (field, rank) nationally, by last university.
    let mut sums: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for id in &scored {
        let row = &last_row[id];
        let pool: Vec<f64> = scored
            .iter()
            .filter(|i| field_of[*i] == row.sds && last_row[*i].rank == row.rank)
            .map(|i| out.fss[i])
            .collect();
        let m = mean(&pool).unwrap();
        let ratio = if m > 0.0 { out.fss[id] / m } else { 0.0 };
        sums.entry(row.uni.clone()).or_default().push(ratio);
    }
    out.university_productivity = sums
        .into_iter()
        .map(|(u, v)| (u, mean(&v).unwrap()))
        .collect();
    out
}
