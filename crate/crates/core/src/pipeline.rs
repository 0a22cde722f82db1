//! End-to-end assessment of a validated dataset.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::indicators::{full_report, EffectivenessTable};
use crate::mobility::{
    build_cohorts, derive_events, summarize_mobility, CareerEvent, MobilityTable, UniversityCohorts,
};
use crate::model::{
    classify_bibliometric_sds, restrict_to_bibliometric, AssessmentConfig, Dataset, IssueLog,
    SdsClassification, UniversityId,
};
use crate::scoring::{
    compute_baselines, compute_productivity, university_productivity, Baselines, Productivity,
};
use crate::stats::{correlation_matrix, CorrelationMatrix};

#[derive(Debug)]
pub struct Analysis {
    pub classification: SdsClassification,
    /// The bibliometric subset everything below is computed on.
    pub restricted: Dataset,
    pub baselines: Baselines,
    pub productivity: Productivity,
    pub events: Vec<CareerEvent>,
    pub cohorts: BTreeMap<UniversityId, UniversityCohorts>,
    pub mobility: MobilityTable,
    pub effectiveness: EffectivenessTable,
    pub university_productivity: BTreeMap<UniversityId, f64>,
    /// `None` with fewer than three eligible universities.
    pub correlations: Option<CorrelationMatrix>,
    pub issues: IssueLog,
}

/// Classifies fields, restricts to bibliometric ones, scores researchers and
/// evaluates recruitment and turnover for every university.
///
/// Citation baselines use the whole corpus, so non-bibliometric publications
/// still count as references for their categories.
pub fn analyze(dataset: &Dataset, config: &AssessmentConfig) -> Result<Analysis> {
    config.validate()?;
    let period = config.period();
    let mut issues = IssueLog::new();

    let (classification, log) = classify_bibliometric_sds(dataset, config);
    issues.extend(log);
    let (restricted, log) = restrict_to_bibliometric(dataset, &classification.bibliometric, period);
    issues.extend(log);

    let baselines = compute_baselines(dataset, period);
    let (productivity, log) = compute_productivity(&restricted, &baselines, config);
    issues.extend(log);

    // Events come from the full roster so that "first observed year" is the
    // same for every field.
    let (events, log) = derive_events(dataset, period);
    issues.extend(log);
    let events: Vec<CareerEvent> = events
        .into_iter()
        .filter(|e| !restricted.career(&e.researcher_id).is_empty())
        .collect();
    let (cohorts, log) = build_cohorts(&events, &restricted, config);
    issues.extend(log);
    let mobility = summarize_mobility(&cohorts, &restricted, period);

    let (effectiveness, log) = full_report(&cohorts, &productivity, &config.salary_weights);
    issues.extend(log);
    let university_productivity = university_productivity(&productivity);
    let correlations = if effectiveness.rows.len() >= 3 {
        Some(correlation_matrix(
            &effectiveness.rows,
            &university_productivity,
        ))
    } else {
        if !effectiveness.rows.is_empty() {
            issues.warning(
                "correlations",
                format!(
                    "{} eligible universities; correlations need at least 3",
                    effectiveness.rows.len()
                ),
            );
        }
        None
    };

    Ok(Analysis {
        classification,
        restricted,
        baselines,
        productivity,
        events,
        cohorts,
        mobility,
        effectiveness,
        university_productivity,
        correlations,
        issues,
    })
}
