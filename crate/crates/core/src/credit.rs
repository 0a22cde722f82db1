//! Co-authorship credit: each author's fractional contribution to a
//! publication, either equal (alphabetical bylines) or by byline position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AuthorSlot, IssueLog, PubId, Publication};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CreditScheme {
    /// Byline order carries no information; every author gets 1/n.
    #[default]
    Alphabetical,
    /// Byline order signals contribution; first and last authors weigh most.
    Positional,
}

/// Shares used by the positional scheme.
///
/// Intra-mural (first and last author at the same university): each end gets
/// `intra_end`, the interior splits the rest. Extra-mural: each end gets
/// `extra_end`, second and second-to-last get `extra_second`, the remaining
/// authors split the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionalWeights {
    pub intra_end: f64,
    pub extra_end: f64,
    pub extra_second: f64,
}

impl Default for PositionalWeights {
    fn default() -> Self {
        Self {
            intra_end: 0.40,
            extra_end: 0.30,
            extra_second: 0.15,
        }
    }
}

impl PositionalWeights {
    pub fn validate(&self) -> Result<()> {
        let shares = [self.intra_end, self.extra_end, self.extra_second];
        if shares.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Config(
                "positional weights must be non-negative".into(),
            ));
        }
        if 2.0 * self.intra_end > 1.0 || 2.0 * (self.extra_end + self.extra_second) > 1.0 {
            return Err(Error::Config(
                "positional role shares exceed the whole publication".into(),
            ));
        }
        if self.intra_end == 0.0 && self.extra_end == 0.0 && self.extra_second == 0.0 {
            return Err(Error::Config("positional weights are all zero".into()));
        }
        Ok(())
    }
}

/// Fractional contributions aligned with byline positions.
#[derive(Debug, Clone, PartialEq)]
pub struct CreditVector {
    pub pub_id: PubId,
    pub weights: Vec<f64>,
}

impl CreditVector {
    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn equal_fractions(n_authors: usize) -> Result<Vec<f64>> {
    if n_authors == 0 {
        return Err(Error::InvalidInput(
            "a publication needs at least one author".into(),
        ));
    }
    let share = 1.0 / n_authors as f64;
    let mut weights = vec![share; n_authors];
    renormalize(&mut weights);
    Ok(weights)
}

/// Positional split, falling back to equal shares (with a warning) when the
/// first or last author has no affiliation.
pub fn positional_fractions(
    authors: &[AuthorSlot],
    weights: &PositionalWeights,
    issues: &mut IssueLog,
    locus: &str,
) -> Result<Vec<f64>> {
    let n = authors.len();
    if n <= 1 {
        return equal_fractions(n);
    }
    let (Some(first), Some(last)) = (&authors[0].university_id, &authors[n - 1].university_id)
    else {
        issues.warning(
            locus,
            "first or last author has no affiliation; positional credit falls back to equal shares",
        );
        return equal_fractions(n);
    };

    let mut w = vec![0.0; n];
    let mut dropped = false;
    if first == last {
        w[0] += weights.intra_end;
        w[n - 1] += weights.intra_end;
        let residual = 1.0 - 2.0 * weights.intra_end;
        dropped |= spread(&mut w[1..n - 1], residual);
    } else {
        w[0] += weights.extra_end;
        w[n - 1] += weights.extra_end;
        w[1] += weights.extra_second;
        w[n - 2] += weights.extra_second;
        let residual = 1.0 - 2.0 * (weights.extra_end + weights.extra_second);
        // Interior authors other than the second and second-to-last.
        let rest = if n >= 4 {
            &mut w[2..n - 2]
        } else {
            &mut w[0..0]
        };
        // For n < 4 roles coincide and there is no one left for the residual.
        dropped |= spread(rest, residual);
    }
    if dropped {
        renormalize(&mut w);
    }
    Ok(w)
}

/// Adds `share / len` to each element. Returns true when there was a
/// positive share but nobody to receive it.
fn spread(recipients: &mut [f64], share: f64) -> bool {
    if recipients.is_empty() {
        return share > 0.0;
    }
    let each = share / recipients.len() as f64;
    for w in recipients {
        *w += each;
    }
    false
}

fn renormalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
}

pub fn credit_for(
    publication: &Publication,
    scheme: CreditScheme,
    weights: &PositionalWeights,
    issues: &mut IssueLog,
) -> Result<CreditVector> {
    let weights = match scheme {
        CreditScheme::Alphabetical => equal_fractions(publication.n_authors())?,
        CreditScheme::Positional => positional_fractions(
            &publication.authors,
            weights,
            issues,
            &format!("publication {}", publication.pub_id),
        )?,
    };
    Ok(CreditVector {
        pub_id: publication.pub_id.clone(),
        weights,
    })
}
