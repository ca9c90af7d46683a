//! Probability of word coincidences between two records.
//!
//! Every field is modelled as a universe of `N` equally likely words. Two
//! records that carry `n_i` and `n_j` distinct words in the field are treated
//! as two independent draws without replacement from that universe, so the
//! number of shared words follows a hypergeometric law. All probabilities are
//! returned as base-10 logarithms.

use std::f64::consts::LN_10;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoincidenceError {
    #[error(
        "coincidence arguments out of domain: n_common={n_common}, n_i={n_i}, n_j={n_j}, n_values={n_values}"
    )]
    Domain {
        n_common: u64,
        n_i: u64,
        n_j: u64,
        n_values: u64,
    },
    #[error("invalid field model: {0}")]
    InvalidModel(String),
}

/// log10 of the assumed number of distinct values of each field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSizes {
    pub authors: f64,
    pub email: f64,
    pub address: f64,
    pub title: f64,
    pub keywords: f64,
    pub research_field: f64,
    pub journal: f64,
    pub year: f64,
}

impl Default for FieldSizes {
    fn default() -> Self {
        FieldSizes {
            authors: 4.0,
            email: 6.0,
            address: 2.0,
            title: 2.0,
            keywords: 3.0,
            research_field: 2.0,
            journal: 2.0,
            year: 1.0,
        }
    }
}

impl FieldSizes {
    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::Authors => self.authors,
            Field::Email => self.email,
            Field::Address => self.address,
            Field::Title => self.title,
            Field::Keywords => self.keywords,
            Field::ResearchField => self.research_field,
            Field::Journal => self.journal,
            Field::Year => self.year,
        }
    }

    pub fn set(&mut self, field: Field, log10_size: f64) {
        let slot = match field {
            Field::Authors => &mut self.authors,
            Field::Email => &mut self.email,
            Field::Address => &mut self.address,
            Field::Title => &mut self.title,
            Field::Keywords => &mut self.keywords,
            Field::ResearchField => &mut self.research_field,
            Field::Journal => &mut self.journal,
            Field::Year => &mut self.year,
        };
        *slot = log10_size;
    }
}

/// Document-universe size plus per-field universe sizes, all as log10.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldModel {
    pub log10_n_docs: f64,
    pub field_sizes: FieldSizes,
}

impl Default for FieldModel {
    fn default() -> Self {
        FieldModel {
            log10_n_docs: 8.0,
            field_sizes: FieldSizes::default(),
        }
    }
}

impl FieldModel {
    pub fn validate(&self) -> Result<(), CoincidenceError> {
        if !(self.log10_n_docs.is_finite() && self.log10_n_docs > 0.0) {
            return Err(CoincidenceError::InvalidModel(format!(
                "log10_n_docs must be positive, got {}",
                self.log10_n_docs
            )));
        }
        for field in Field::ALL {
            let size = self.field_sizes.get(field);
            if !(size.is_finite() && size > 0.0) {
                return Err(CoincidenceError::InvalidModel(format!(
                    "size of field `{field}` must be positive, got {size}"
                )));
            }
            if size > 18.0 {
                return Err(CoincidenceError::InvalidModel(format!(
                    "size of field `{field}` is too large: 10^{size}"
                )));
            }
            if self.universe(field) < 2 {
                return Err(CoincidenceError::InvalidModel(format!(
                    "field `{field}` must have at least 2 possible values"
                )));
            }
        }
        Ok(())
    }

    /// Number of equally likely values `N` assumed for `field`.
    pub fn universe(&self, field: Field) -> u64 {
        10f64.powf(self.field_sizes.get(field)).round() as u64
    }
}

/// `ln C(n, k)` as a sum of logarithms of ratios; accurate for any `n` when
/// `min(k, n-k)` is moderate, which is always the case for word counts.
fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let base = (n - k) as f64;
    (1..=k).map(|i| ((base + i as f64) / i as f64).ln()).sum()
}

fn check_domain(n_common: u64, n_i: u64, n_j: u64, n_values: u64) -> Result<(), CoincidenceError> {
    if n_common > n_i.min(n_j) || n_i > n_values || n_j > n_values {
        Err(CoincidenceError::Domain {
            n_common,
            n_i,
            n_j,
            n_values,
        })
    } else {
        Ok(())
    }
}

/// Natural log of the point probability; `-inf` below the support.
///
/// Written as `C(a,c) * prod_{t<c} (b-t)/(N-t) * prod_{t<a-c} (1 - (b-c)/(N-c-t))`
/// with `a <= b`, which equals the factorial ratio but never forms the huge
/// `ln N!` terms, so it keeps full relative precision for `N` up to 1e8 and
/// beyond.
fn ln_p_point(c: u64, n_i: u64, n_j: u64, n: u64) -> f64 {
    let (a, b) = if n_i <= n_j { (n_i, n_j) } else { (n_j, n_i) };
    if a + b > n + c {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    let mut ln_p = ln_choose(a, c);
    for t in 0..c {
        ln_p += ((b - t) as f64 / (nf - t as f64)).ln();
    }
    let missing = (b - c) as f64;
    for t in 0..(a - c) {
        ln_p += (-missing / (nf - (c + t) as f64)).ln_1p();
    }
    ln_p
}

/// log10 of the probability that exactly `n_common` words coincide.
pub fn log_p_exact(
    n_common: u64,
    n_i: u64,
    n_j: u64,
    n_values: u64,
) -> Result<f64, CoincidenceError> {
    check_domain(n_common, n_i, n_j, n_values)?;
    Ok(ln_p_point(n_common, n_i, n_j, n_values) / LN_10)
}

/// log10 of the probability that at least `n_common` words coincide.
///
/// Summed upward from `n_common`, so deep tails never suffer cancellation.
pub fn log_p_tail(
    n_common: u64,
    n_i: u64,
    n_j: u64,
    n_values: u64,
) -> Result<f64, CoincidenceError> {
    check_domain(n_common, n_i, n_j, n_values)?;
    Ok(log_p_tail_unchecked(n_common, n_i, n_j, n_values))
}

fn log_p_tail_unchecked(n_common: u64, n_i: u64, n_j: u64, n_values: u64) -> f64 {
    if n_common == 0 {
        return 0.0;
    }
    let lower = (n_i + n_j).saturating_sub(n_values).max(n_common);
    let upper = n_i.min(n_j);
    let terms: Vec<f64> = (lower..=upper)
        .map(|c| ln_p_point(c, n_i, n_j, n_values))
        .collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    // rounding can push a certain event a hair above probability one
    ((peak + sum.ln()) / LN_10).min(0.0)
}

/// Contribution of one field to the distance between two records.
///
/// Word counts larger than the assumed universe are clamped to it. An empty
/// set on either side contributes nothing.
pub fn field_coincidence(
    words_i: &IndexSet<String>,
    words_j: &IndexSet<String>,
    field: Field,
    model: &FieldModel,
) -> f64 {
    if words_i.is_empty() || words_j.is_empty() {
        return 0.0;
    }
    let (small, large) = if words_i.len() <= words_j.len() {
        (words_i, words_j)
    } else {
        (words_j, words_i)
    };
    let common = small.iter().filter(|w| large.contains(*w)).count() as u64;
    set_coincidence(
        common,
        words_i.len() as u64,
        words_j.len() as u64,
        model.universe(field),
    )
}

pub(crate) fn set_coincidence(common: u64, n_i: u64, n_j: u64, n_values: u64) -> f64 {
    let n_i = n_i.min(n_values);
    let n_j = n_j.min(n_values);
    let common = common.min(n_i).min(n_j);
    log_p_tail_unchecked(common, n_i, n_j, n_values)
}
