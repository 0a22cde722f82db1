//! Builders for small in-memory datasets.

use crate::model::{AuthorSlot, Dataset, Publication, Rank, RosterEntry};

/// `(researcher, year, university, sds, rank)`; the area is the field's
/// first letter.
pub fn roster(rows: &[(&str, i32, &str, &str, Rank)]) -> Vec<RosterEntry> {
    rows.iter()
        .map(|&(r, year, u, sds, rank)| RosterEntry {
            researcher_id: r.into(),
            year,
            university_id: u.into(),
            sds_code: sds.into(),
            uda_code: sds[..1].into(),
            rank,
        })
        .collect()
}

/// One roster row per year in `years`.
pub fn career(
    researcher: &str,
    years: std::ops::RangeInclusive<i32>,
    university: &str,
    sds: &str,
    rank: Rank,
) -> Vec<RosterEntry> {
    years
        .map(|y| roster(&[(researcher, y, university, sds, rank)]).remove(0))
        .collect()
}

/// Byline of `(university, researcher)` pairs.
pub fn publication(
    id: &str,
    year: i32,
    citations: u64,
    categories: &[&str],
    byline: &[(Option<&str>, Option<&str>)],
) -> Publication {
    Publication {
        pub_id: id.into(),
        year,
        citations,
        subject_categories: categories.iter().map(|c| (*c).into()).collect(),
        authors: byline
            .iter()
            .enumerate()
            .map(|(i, (u, r))| AuthorSlot {
                position: i as u32 + 1,
                university_id: u.map(Into::into),
                researcher_id: r.map(Into::into),
            })
            .collect(),
    }
}

/// Builds a dataset and insists it is clean.
pub fn dataset(roster: Vec<RosterEntry>, publications: Vec<Publication>) -> Dataset {
    let (d, issues) = Dataset::from_records(roster, publications, i32::MAX);
    assert!(issues.is_empty(), "{:?}", issues.into_vec());
    d
}
