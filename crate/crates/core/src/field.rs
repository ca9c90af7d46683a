use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The record fields that take part in the coincidence distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Authors,
    Email,
    Address,
    Title,
    Keywords,
    ResearchField,
    Journal,
    Year,
}

impl Field {
    pub const ALL: [Field; 8] = [
        Field::Authors,
        Field::Email,
        Field::Address,
        Field::Title,
        Field::Keywords,
        Field::ResearchField,
        Field::Journal,
        Field::Year,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Authors => "authors",
            Field::Email => "email",
            Field::Address => "address",
            Field::Title => "title",
            Field::Keywords => "keywords",
            Field::ResearchField => "research_field",
            Field::Journal => "journal",
            Field::Year => "year",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown field name `{0}`")]
pub struct UnknownField(pub String);

impl FromStr for Field {
    type Err = UnknownField;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Field::ALL
            .into_iter()
            .find(|f| f.as_str() == norm)
            .or(match norm.as_str() {
                "address_words" | "addresses" => Some(Field::Address),
                "title_words" => Some(Field::Title),
                "emails" => Some(Field::Email),
                "research_fields" | "subject" => Some(Field::ResearchField),
                _ => None,
            })
            .ok_or_else(|| UnknownField(s.to_string()))
    }
}
