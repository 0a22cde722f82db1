//! Domain types, dataset ingestion and validation, and the bibliometric
//! field test.

mod dataset;
mod issues;
mod load;
mod types;

pub use dataset::{
    classify_bibliometric_sds, period_profile, period_profiles, restrict_to_bibliometric,
    Authorship, Dataset, PeriodProfile, SdsClassification,
};
pub use issues::{DataQualityIssue, IssueLog, Severity};
pub use load::{
    load_dataset, load_dataset_files, load_salary_weights, open, DatasetPaths, Loaded,
    AUTHORSHIP_COLUMNS, PUBLICATION_COLUMNS, ROSTER_COLUMNS, SALARY_COLUMNS,
};
pub use types::*;
