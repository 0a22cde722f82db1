use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::credit::{CreditScheme, PositionalWeights};
use crate::error::{Error, Result};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }
    };
}

id_newtype!(
    /// Opaque identifier of a tracked researcher.
    ResearcherId
);
id_newtype!(UniversityId);
id_newtype!(
    /// Fine-grained field code. Every professor belongs to exactly one per year.
    SdsCode
);
id_newtype!(
    /// Coarse discipline area grouping several field codes.
    UdaCode
);
id_newtype!(PubId);
id_newtype!(CategoryCode);

/// Academic rank, ordered from junior to senior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank {
    Assistant,
    Associate,
    Full,
}

impl Rank {
    pub const ALL: [Rank; 3] = [Rank::Assistant, Rank::Associate, Rank::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Rank::Assistant => "assistant",
            Rank::Associate => "associate",
            Rank::Full => "full",
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rank {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "assistant" => Ok(Rank::Assistant),
            "associate" => Ok(Rank::Associate),
            "full" => Ok(Rank::Full),
            other => Err(Error::InvalidInput(format!(
                "unknown rank {other:?} (expected assistant, associate or full)"
            ))),
        }
    }
}

/// Inclusive range of calendar years under assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    pub start: i32,
    pub end: i32,
}

impl Period {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if end < start {
            return Err(Error::Config(format!(
                "period end {end} precedes period start {start}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn len(&self) -> u32 {
        (self.end - self.start + 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// One researcher's affiliation in one year.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosterEntry {
    pub researcher_id: ResearcherId,
    pub year: i32,
    pub university_id: UniversityId,
    pub sds_code: SdsCode,
    pub uda_code: UdaCode,
    pub rank: Rank,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorSlot {
    /// 1-based position in the byline.
    pub position: u32,
    pub university_id: Option<UniversityId>,
    /// Absent for external or otherwise untracked authors.
    pub researcher_id: Option<ResearcherId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Publication {
    pub pub_id: PubId,
    pub year: i32,
    pub citations: u64,
    /// Sorted and de-duplicated.
    pub subject_categories: Vec<CategoryCode>,
    /// Ordered by position; positions run 1..=n.
    pub authors: Vec<AuthorSlot>,
}

impl Publication {
    pub fn n_authors(&self) -> usize {
        self.authors.len()
    }
}

/// Average-salary weight per rank, relative to the assistant rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<Rank, f64>", into = "BTreeMap<Rank, f64>")]
pub struct SalaryWeights {
    raw: BTreeMap<Rank, f64>,
}

impl SalaryWeights {
    pub fn new(raw: BTreeMap<Rank, f64>) -> Result<Self> {
        for rank in Rank::ALL {
            match raw.get(&rank) {
                None => {
                    return Err(Error::Config(format!(
                        "missing salary weight for rank {rank}"
                    )))
                }
                Some(w) if !(w.is_finite() && *w > 0.0) => {
                    return Err(Error::Config(format!(
                        "salary weight for rank {rank} must be positive, got {w}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(Self { raw })
    }

    pub fn uniform() -> Self {
        Self {
            raw: Rank::ALL.iter().map(|r| (*r, 1.0)).collect(),
        }
    }

    /// Weight as supplied.
    pub fn raw(&self, rank: Rank) -> f64 {
        self.raw[&rank]
    }

    /// Weight with the assistant rank pinned at 1.0.
    pub fn relative(&self, rank: Rank) -> f64 {
        if rank == Rank::Assistant {
            1.0
        } else {
            self.raw[&rank] / self.raw[&Rank::Assistant]
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.raw.iter().map(|(r, w)| (*r, w * factor)).collect())
    }
}

impl Default for SalaryWeights {
    fn default() -> Self {
        Self::uniform()
    }
}

impl TryFrom<BTreeMap<Rank, f64>> for SalaryWeights {
    type Error = Error;

    fn try_from(raw: BTreeMap<Rank, f64>) -> Result<Self> {
        Self::new(raw)
    }
}

impl From<SalaryWeights> for BTreeMap<Rank, f64> {
    fn from(w: SalaryWeights) -> Self {
        w.raw
    }
}

fn default_min_service_years() -> u32 {
    3
}

fn default_min_group_size() -> usize {
    4
}

fn default_bibliometric_share() -> f64 {
    0.5
}

/// Run parameters. Serialized form is the JSON config document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentConfig {
    pub period_start: i32,
    pub period_end: i32,
    #[serde(default = "default_min_service_years")]
    pub min_service_years: u32,
    #[serde(default = "default_min_group_size")]
    pub min_group_size: usize,
    #[serde(default = "default_bibliometric_share")]
    pub bibliometric_share: f64,
    #[serde(default)]
    pub salary_weights: SalaryWeights,
    /// Per-field override of the co-authorship credit scheme.
    #[serde(default)]
    pub credit_scheme: BTreeMap<SdsCode, CreditScheme>,
    #[serde(default)]
    pub default_credit_scheme: CreditScheme,
    #[serde(default)]
    pub positional_weights: PositionalWeights,
    /// Forces equal 1/n credit everywhere.
    #[serde(default)]
    pub force_equal_credit: bool,
}

impl AssessmentConfig {
    pub fn new(period_start: i32, period_end: i32) -> Self {
        Self {
            period_start,
            period_end,
            min_service_years: default_min_service_years(),
            min_group_size: default_min_group_size(),
            bibliometric_share: default_bibliometric_share(),
            salary_weights: SalaryWeights::default(),
            credit_scheme: BTreeMap::new(),
            default_credit_scheme: CreditScheme::default(),
            positional_weights: PositionalWeights::default(),
            force_equal_credit: false,
        }
    }

    pub fn period(&self) -> Period {
        Period {
            start: self.period_start,
            end: self.period_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Period::new(self.period_start, self.period_end)?;
        if !(self.bibliometric_share > 0.0 && self.bibliometric_share <= 1.0) {
            return Err(Error::Config(format!(
                "bibliometric_share must lie in (0, 1], got {}",
                self.bibliometric_share
            )));
        }
        if self.min_service_years == 0 {
            return Err(Error::Config("min_service_years must be at least 1".into()));
        }
        if self.min_group_size == 0 {
            return Err(Error::Config("min_group_size must be at least 1".into()));
        }
        self.positional_weights.validate()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn scheme_for(&self, sds: &SdsCode) -> CreditScheme {
        if self.force_equal_credit {
            return CreditScheme::Alphabetical;
        }
        self.credit_scheme
            .get(sds)
            .copied()
            .unwrap_or(self.default_credit_scheme)
    }
}
