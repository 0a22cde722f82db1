use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A problem found in the input or while computing. Errors block downstream
/// computation, warnings do not.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DataQualityIssue {
    pub severity: Severity,
    /// Where the problem sits, e.g. `roster.csv:12` or `publication P7`.
    pub locus: String,
    pub message: String,
}

impl fmt::Display for DataQualityIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: {}: {}", self.locus, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IssueLog {
    issues: Vec<DataQualityIssue>,
}

impl IssueLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn error(&mut self, locus: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, locus, message);
    }

    pub fn warning(&mut self, locus: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Warning, locus, message);
    }

    fn push(&mut self, severity: Severity, locus: impl Into<String>, message: impl Into<String>) {
        self.issues.push(DataQualityIssue {
            severity,
            locus: locus.into(),
            message: message.into(),
        });
    }

    pub fn extend(&mut self, other: IssueLog) {
        self.issues.extend(other.issues);
    }

    pub fn has_errors(&self) -> bool {
        self.error_count() > 0
    }

    pub fn error_count(&self) -> usize {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Error)
            .count()
    }

    pub fn warning_count(&self) -> usize {
        self.issues.len() - self.error_count()
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DataQualityIssue> {
        self.issues.iter()
    }

    pub fn into_vec(self) -> Vec<DataQualityIssue> {
        self.issues
    }
}

impl IntoIterator for IssueLog {
    type Item = DataQualityIssue;
    type IntoIter = std::vec::IntoIter<DataQualityIssue>;

    fn into_iter(self) -> Self::IntoIter {
        self.issues.into_iter()
    }
}

impl From<Vec<DataQualityIssue>> for IssueLog {
    fn from(issues: Vec<DataQualityIssue>) -> Self {
        Self { issues }
    }
}
