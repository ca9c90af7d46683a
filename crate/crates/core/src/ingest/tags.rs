//! Mapping from export tags and TSV columns to record slots.
//!
//! This table is the single place that decides which source field feeds which
//! word set; `docs/formats.md` mirrors it.

/// A raw source field before tokenization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Authors,
    AuthorsFull,
    Title,
    SourceTitle,
    IsoAbbrev,
    SourceAbbrev,
    AuthorKeywords,
    KeywordsPlus,
    Addresses,
    Email,
    Subject,
    Year,
    TimesCited,
    Volume,
    BeginPage,
    EndPage,
}

/// How continuation lines are joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Join {
    /// one value per line (author lists, addresses)
    Lines,
    /// a long value wrapped over several lines
    Wrapped,
}

pub const TAGGED_FIELDS: &[(&str, Slot, Join)] = &[
    ("AU", Slot::Authors, Join::Lines),
    ("AF", Slot::AuthorsFull, Join::Lines),
    ("TI", Slot::Title, Join::Wrapped),
    ("SO", Slot::SourceTitle, Join::Wrapped),
    ("JI", Slot::IsoAbbrev, Join::Wrapped),
    ("J9", Slot::SourceAbbrev, Join::Wrapped),
    ("DE", Slot::AuthorKeywords, Join::Wrapped),
    ("ID", Slot::KeywordsPlus, Join::Wrapped),
    ("C1", Slot::Addresses, Join::Lines),
    ("EM", Slot::Email, Join::Wrapped),
    ("SC", Slot::Subject, Join::Wrapped),
    ("WC", Slot::Subject, Join::Wrapped),
    ("PY", Slot::Year, Join::Wrapped),
    ("TC", Slot::TimesCited, Join::Wrapped),
    ("VL", Slot::Volume, Join::Wrapped),
    ("BP", Slot::BeginPage, Join::Wrapped),
    ("EP", Slot::EndPage, Join::Wrapped),
];

/// File header tags allowed outside records.
pub const HEADER_TAGS: &[&str] = &["FN", "VR"];
pub const END_OF_RECORD: &str = "ER";
pub const END_OF_FILE: &str = "EF";

/// Canonical TSV columns, in the order written by exports.
pub const TSV_COLUMNS: &[(&str, Slot)] = &[
    ("authors", Slot::Authors),
    ("title", Slot::Title),
    ("source", Slot::SourceTitle),
    ("keywords", Slot::AuthorKeywords),
    ("addresses", Slot::Addresses),
    ("email", Slot::Email),
    ("subject", Slot::Subject),
    ("year", Slot::Year),
    ("times_cited", Slot::TimesCited),
];

pub fn tagged_slot(tag: &str) -> Option<(Slot, Join)> {
    TAGGED_FIELDS
        .iter()
        .find(|(t, _, _)| *t == tag)
        .map(|&(_, slot, join)| (slot, join))
}

pub fn tsv_slot(column: &str) -> Option<Slot> {
    let column = column.trim().to_ascii_lowercase();
    TSV_COLUMNS
        .iter()
        .find(|(c, _)| *c == column)
        .map(|&(_, slot)| slot)
}
