//! CSV ingestion.
//!
//! Parsing is done per file first, collecting every row-level problem, and
//! only then are rows cross-referenced (duplicate keys, unknown publications,
//! byline contiguity). A file with errors therefore reports all of them in a
//! single pass.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use csv::StringRecord;

use super::dataset::{Dataset, RawRecords};
use super::issues::IssueLog;
use super::types::*;
use crate::error::{Error, Result};

pub const ROSTER_COLUMNS: [&str; 6] = [
    "researcher_id",
    "year",
    "university_id",
    "sds_code",
    "uda_code",
    "rank",
];
pub const PUBLICATION_COLUMNS: [&str; 4] = ["pub_id", "year", "citations", "subject_categories"];
pub const AUTHORSHIP_COLUMNS: [&str; 4] = ["pub_id", "position", "university_id", "researcher_id"];
pub const SALARY_COLUMNS: [&str; 2] = ["rank", "weight"];

const ROSTER_FILE: &str = "roster.csv";
const PUBLICATION_FILE: &str = "publications.csv";
const AUTHORSHIP_FILE: &str = "authorships.csv";

#[derive(Debug)]
pub struct Loaded {
    pub dataset: Dataset,
    pub issues: IssueLog,
}

#[derive(Debug, Clone)]
pub struct DatasetPaths {
    pub roster: PathBuf,
    pub publications: PathBuf,
    pub authorships: PathBuf,
}

impl DatasetPaths {
    /// The conventional file names inside one directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            roster: dir.join(ROSTER_FILE),
            publications: dir.join(PUBLICATION_FILE),
            authorships: dir.join(AUTHORSHIP_FILE),
        }
    }
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn load_dataset_files(paths: &DatasetPaths, config: &AssessmentConfig) -> Result<Loaded> {
    load_dataset(
        open(&paths.roster)?,
        open(&paths.publications)?,
        open(&paths.authorships)?,
        config,
    )
}

pub fn load_dataset(
    roster: impl Read,
    publications: impl Read,
    authorships: impl Read,
    config: &AssessmentConfig,
) -> Result<Loaded> {
    let mut issues = IssueLog::new();
    let mut raw = RawRecords::default();

    read_table(
        roster,
        ROSTER_FILE,
        &ROSTER_COLUMNS,
        &mut issues,
        |row, issues| {
            if let Some(entry) = parse_roster_row(row, issues) {
                raw.roster.push((row.locus(), entry));
            }
        },
    )?;
    read_table(
        publications,
        PUBLICATION_FILE,
        &PUBLICATION_COLUMNS,
        &mut issues,
        |row, issues| {
            if let Some(publication) = parse_publication_row(row, issues) {
                raw.publications.push((row.locus(), publication));
            }
        },
    )?;
    read_table(
        authorships,
        AUTHORSHIP_FILE,
        &AUTHORSHIP_COLUMNS,
        &mut issues,
        |row, issues| {
            if let Some((pub_id, slot)) = parse_authorship_row(row, issues) {
                raw.slots.push((row.locus(), pub_id, slot));
            }
        },
    )?;

    let (dataset, xref_issues) = raw.cross_reference(config.period_end);
    issues.extend(xref_issues);
    Ok(Loaded { dataset, issues })
}

/// Reads `salaries.csv` (`rank,weight`).
pub fn load_salary_weights(reader: impl Read) -> Result<SalaryWeights> {
    let mut issues = IssueLog::new();
    let mut weights = BTreeMap::new();
    read_table(
        reader,
        "salaries.csv",
        &SALARY_COLUMNS,
        &mut issues,
        |row, issues| {
            let rank = match row.get("rank").parse::<Rank>() {
                Ok(rank) => rank,
                Err(e) => return issues.error(row.locus(), e.to_string()),
            };
            match row.get("weight").parse::<f64>() {
                Ok(w) => {
                    if weights.insert(rank, w).is_some() {
                        issues.error(row.locus(), format!("duplicate weight for rank {rank}"));
                    }
                }
                Err(_) => issues.error(
                    row.locus(),
                    format!("weight {:?} is not a number", row.get("weight")),
                ),
            }
        },
    )?;
    if let Some(first) = issues.iter().next() {
        return Err(Error::Config(first.to_string()));
    }
    SalaryWeights::new(weights)
}

struct Row<'a> {
    file: &'a str,
    line: u64,
    record: &'a StringRecord,
    columns: &'a BTreeMap<&'static str, usize>,
}

impl Row<'_> {
    fn get(&self, column: &str) -> &str {
        self.columns
            .get(column)
            .and_then(|&i| self.record.get(i))
            .map(str::trim)
            .unwrap_or("")
    }

    fn optional(&self, column: &str) -> Option<&str> {
        Some(self.get(column)).filter(|s| !s.is_empty())
    }

    fn locus(&self) -> String {
        format!("{}:{}", self.file, self.line)
    }

    fn required(&self, column: &str, issues: &mut IssueLog) -> Option<&str> {
        let value = self.optional(column);
        if value.is_none() {
            issues.error(self.locus(), format!("empty value in column {column}"));
        }
        value
    }

    fn integer<T: std::str::FromStr>(&self, column: &str, issues: &mut IssueLog) -> Option<T> {
        let text = self.required(column, issues)?;
        match text.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                issues.error(
                    self.locus(),
                    format!("column {column}: {text:?} is not a valid non-negative integer"),
                );
                None
            }
        }
    }
}

fn read_table<R: Read>(
    reader: R,
    file: &str,
    required: &[&'static str],
    issues: &mut IssueLog,
    mut on_row: impl FnMut(&Row<'_>, &mut IssueLog),
) -> Result<()> {
    let mut csv = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(reader);

    let headers = match csv.headers() {
        Ok(h) => h.clone(),
        Err(e) => return record_error(e, file, issues),
    };
    if headers.is_empty() {
        // An empty file has no header at all; treat as a table with no rows.
        return Ok(());
    }
    let mut columns = BTreeMap::new();
    for name in required {
        match headers.iter().position(|h| h.trim() == *name) {
            Some(i) => {
                columns.insert(*name, i);
            }
            None => issues.error(
                format!("{file}:1"),
                format!("missing required column {name}"),
            ),
        }
    }
    if columns.len() < required.len() {
        return Ok(());
    }

    let mut record = StringRecord::new();
    loop {
        match csv.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map(|p| p.line()).unwrap_or(0);
                if record.len() < headers.len() {
                    issues.error(
                        format!("{file}:{line}"),
                        format!(
                            "malformed row: expected {} fields, found {}",
                            headers.len(),
                            record.len()
                        ),
                    );
                    continue;
                }
                let row = Row {
                    file,
                    line,
                    record: &record,
                    columns: &columns,
                };
                on_row(&row, issues);
            }
            Err(e) => record_error(e, file, issues)?,
        }
    }
    Ok(())
}

fn record_error(e: csv::Error, file: &str, issues: &mut IssueLog) -> Result<()> {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Err(Error::io(file, io)),
        kind => {
            issues.error(format!("{file}:{line}"), format!("malformed row: {kind:?}"));
            Ok(())
        }
    }
}

fn parse_roster_row(row: &Row<'_>, issues: &mut IssueLog) -> Option<RosterEntry> {
    let researcher_id = row
        .required("researcher_id", issues)
        .map(ResearcherId::from);
    let year = row.integer::<i32>("year", issues);
    let university_id = row
        .required("university_id", issues)
        .map(UniversityId::from);
    let sds_code = row.required("sds_code", issues).map(SdsCode::from);
    let uda_code = row.required("uda_code", issues).map(UdaCode::from);
    let rank = row
        .required("rank", issues)
        .and_then(|r| match r.parse::<Rank>() {
            Ok(rank) => Some(rank),
            Err(e) => {
                issues.error(row.locus(), e.to_string());
                None
            }
        });
    Some(RosterEntry {
        researcher_id: researcher_id?,
        year: year?,
        university_id: university_id?,
        sds_code: sds_code?,
        uda_code: uda_code?,
        rank: rank?,
    })
}

fn parse_publication_row(row: &Row<'_>, issues: &mut IssueLog) -> Option<Publication> {
    let pub_id = row.required("pub_id", issues).map(PubId::from);
    let year = row.integer::<i32>("year", issues);
    let citations = row.integer::<u64>("citations", issues);
    let mut categories: Vec<CategoryCode> = row
        .get("subject_categories")
        .split(';')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(CategoryCode::from)
        .collect();
    categories.sort();
    categories.dedup();
    if categories.is_empty() {
        issues.error(row.locus(), "publication has no subject categories");
        return None;
    }
    Some(Publication {
        pub_id: pub_id?,
        year: year?,
        citations: citations?,
        subject_categories: categories,
        authors: Vec::new(),
    })
}

fn parse_authorship_row(row: &Row<'_>, issues: &mut IssueLog) -> Option<(PubId, AuthorSlot)> {
    let pub_id = row.required("pub_id", issues).map(PubId::from);
    let position = row.integer::<u32>("position", issues);
    if position == Some(0) {
        issues.error(row.locus(), "author positions are 1-based");
        return None;
    }
    Some((
        pub_id?,
        AuthorSlot {
            position: position?,
            university_id: row.optional("university_id").map(UniversityId::from),
            researcher_id: row.optional("researcher_id").map(ResearcherId::from),
        },
    ))
}
