//! Parsing of exported bibliographic record files.
//!
//! Two formats are accepted: the tagged-field export (two-letter tags at line
//! start, indented continuation lines, `ER` closing each record) and a
//! tab-separated file with a header row. Every record keeps its original
//! lines so that a filtered export reproduces the source verbatim.

mod tagged;
pub mod tags;
pub mod tokenize;
mod tsv;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::field::Field;
use tags::Slot;
pub use tokenize::{normalize_author, tokenize_field, Tokenizer};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("{source_name}:{line}: {message}")]
    Malformed {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("cannot mix tagged and tab-separated exports in one corpus")]
    MixedFormats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub source_name: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.source_name, self.line, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tagged,
    Tsv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tagged" | "isi" | "wos" => Ok(Format::Tagged),
            "tsv" => Ok(Format::Tsv),
            other => Err(format!("unknown format `{other}` (expected tagged or tsv)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Utf8,
    Latin1,
}

/// Fields of one record as shown to a reviewer.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordDisplay {
    pub title: String,
    pub authors: Vec<String>,
    pub source: String,
    pub address_words: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub id: usize,
    pub authors: IndexSet<String>,
    pub emails: IndexSet<String>,
    pub address_words: IndexSet<String>,
    pub title_words: IndexSet<String>,
    pub keywords: IndexSet<String>,
    pub research_fields: IndexSet<String>,
    pub journal: IndexSet<String>,
    pub year: IndexSet<String>,
    pub citations: u64,
    pub raw: Vec<String>,
    pub display: RecordDisplay,
    /// index into [`Corpus::sources`]
    pub source: usize,
}

impl PublicationRecord {
    pub fn words(&self, field: Field) -> &IndexSet<String> {
        match field {
            Field::Authors => &self.authors,
            Field::Email => &self.emails,
            Field::Address => &self.address_words,
            Field::Title => &self.title_words,
            Field::Keywords => &self.keywords,
            Field::ResearchField => &self.research_fields,
            Field::Journal => &self.journal,
            Field::Year => &self.year,
        }
    }

    pub fn year_value(&self) -> Option<i32> {
        self.year.first().and_then(|y| y.parse().ok())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub name: String,
    pub encoding: Encoding,
    /// header lines (tagged `FN`/`VR`) or the TSV column row
    pub header: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub records: Vec<PublicationRecord>,
    pub query_name: String,
    pub format: Format,
    pub sources: Vec<SourceInfo>,
    /// sha-256 over the source bytes
    pub hash: String,
    pub warnings: Vec<ParseWarning>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// force a format; detected per file when `None`
    pub format: Option<Format>,
    /// the shared author name; the most frequent author token when `None`
    pub query_name: Option<String>,
    pub tokenizer: Tokenizer,
}

/// One source file as read from disk.
#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Source {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Source {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

/// A record after format parsing, before tokenization.
pub(crate) struct RawRecord {
    pub line: usize,
    pub fields: BTreeMap<Slot, String>,
    pub raw: Vec<String>,
}

pub(crate) struct ParsedFile {
    pub header: Vec<String>,
    pub records: Vec<RawRecord>,
    pub warnings: Vec<ParseWarning>,
}

/// Parse a single export file.
pub fn parse_export(file_bytes: &[u8], format: Format) -> Result<Corpus, ParseError> {
    parse_sources(
        &[Source::new("<input>", file_bytes)],
        &ParseOptions {
            format: Some(format),
            ..ParseOptions::default()
        },
    )
}

/// Parse one or more export files into a single corpus with dense ids.
pub fn parse_sources(sources: &[Source], options: &ParseOptions) -> Result<Corpus, ParseError> {
    let mut hasher = Sha256::new();
    let mut format = options.format;
    let mut infos = Vec::new();
    let mut raw_records = Vec::new();
    let mut warnings = Vec::new();

    for (index, source) in sources.iter().enumerate() {
        hasher.update((source.bytes.len() as u64).to_le_bytes());
        hasher.update(&source.bytes);

        let (text, encoding) = decode(&source.bytes);
        let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
        if text.trim().is_empty() {
            infos.push(SourceInfo {
                name: source.name.clone(),
                encoding,
                header: Vec::new(),
            });
            continue;
        }
        let file_format = match options.format {
            Some(f) => f,
            None => detect_format(text),
        };
        match format {
            Some(f) if f != file_format => return Err(ParseError::MixedFormats),
            _ => format = Some(file_format),
        }
        let parsed = match file_format {
            Format::Tagged => tagged::parse(text, &source.name)?,
            Format::Tsv => tsv::parse(text, &source.name)?,
        };
        warnings.extend(parsed.warnings);
        infos.push(SourceInfo {
            name: source.name.clone(),
            encoding,
            header: parsed.header,
        });
        raw_records.extend(parsed.records.into_iter().map(|r| (index, r)));
    }

    let mut records = Vec::with_capacity(raw_records.len());
    for (id, (source, raw)) in raw_records.into_iter().enumerate() {
        let record = build_record(
            id,
            source,
            raw,
            &options.tokenizer,
            &infos[source].name,
            &mut warnings,
        );
        records.push(record);
    }

    let query_name = match &options.query_name {
        Some(name) => normalize_author(name).unwrap_or_default(),
        None => infer_query_name(&records),
    };
    if !query_name.is_empty() {
        for record in records.iter().filter(|r| !r.authors.contains(&query_name)) {
            let warning = ParseWarning {
                source_name: infos[record.source].name.clone(),
                line: 0,
                message: format!("record {} does not list author `{query_name}`", record.id),
            };
            log::warn!("{warning}");
            warnings.push(warning);
        }
    }

    Ok(Corpus {
        records,
        query_name,
        format: format.unwrap_or(Format::Tagged),
        sources: infos,
        hash: hex::encode(hasher.finalize()),
        warnings,
    })
}

/// UTF-8 when valid, Latin-1 otherwise.
pub fn decode(bytes: &[u8]) -> (String, Encoding) {
    match std::str::from_utf8(bytes) {
        Ok(text) => (text.to_string(), Encoding::Utf8),
        Err(_) => (bytes.iter().map(|&b| b as char).collect(), Encoding::Latin1),
    }
}

pub fn detect_format(text: &str) -> Format {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.contains('\t') {
        Format::Tsv
    } else {
        Format::Tagged
    }
}

/// Most frequent author token; ties go to the lexicographically smallest.
pub fn infer_query_name(records: &[PublicationRecord]) -> String {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for author in records.iter().flat_map(|r| r.authors.iter()) {
        *counts.entry(author.as_str()).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(name, _)| name.to_string())
        .unwrap_or_default()
}

fn build_record(
    id: usize,
    source: usize,
    raw: RawRecord,
    tokenizer: &Tokenizer,
    source_name: &str,
    warnings: &mut Vec<ParseWarning>,
) -> PublicationRecord {
    let get = |slot: Slot| raw.fields.get(&slot).map(String::as_str).unwrap_or("");
    let first_nonempty = |slots: &[Slot]| {
        slots
            .iter()
            .map(|&s| get(s))
            .find(|v| !v.trim().is_empty())
            .unwrap_or("")
    };

    let author_text = first_nonempty(&[Slot::Authors, Slot::AuthorsFull]);
    let keyword_text = format!("{}\n{}", get(Slot::AuthorKeywords), get(Slot::KeywordsPlus));
    let journal_text = first_nonempty(&[Slot::SourceAbbrev, Slot::IsoAbbrev, Slot::SourceTitle]);

    let citations_text = get(Slot::TimesCited).trim();
    let citations = if citations_text.is_empty() {
        0
    } else {
        citations_text.parse().unwrap_or_else(|_| {
            warnings.push(ParseWarning {
                source_name: source_name.to_string(),
                line: raw.line,
                message: format!("times-cited value `{citations_text}` is not a count; using 0"),
            });
            0
        })
    };

    let year = tokenizer.tokenize(get(Slot::Year), Field::Year);
    let display = RecordDisplay {
        title: get(Slot::Title)
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" "),
        authors: author_text
            .split(['\n', ';'])
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(str::to_string)
            .collect(),
        source: display_source(
            first_nonempty(&[Slot::IsoAbbrev, Slot::SourceTitle, Slot::SourceAbbrev]),
            year.first().map(String::as_str),
            get(Slot::Volume).trim(),
            get(Slot::BeginPage).trim(),
            get(Slot::EndPage).trim(),
        ),
        address_words: tokenize::address_words(get(Slot::Addresses))
            .map(|(display, _)| display)
            .collect(),
    };

    PublicationRecord {
        id,
        authors: tokenizer.tokenize(author_text, Field::Authors),
        emails: tokenizer.tokenize(get(Slot::Email), Field::Email),
        address_words: tokenizer.tokenize(get(Slot::Addresses), Field::Address),
        title_words: tokenizer.tokenize(get(Slot::Title), Field::Title),
        keywords: tokenizer.tokenize(&keyword_text, Field::Keywords),
        research_fields: tokenizer.tokenize(get(Slot::Subject), Field::ResearchField),
        journal: tokenizer.tokenize(journal_text, Field::Journal),
        year,
        citations,
        raw: raw.raw,
        display,
        source,
    }
}

fn display_source(name: &str, year: Option<&str>, volume: &str, begin: &str, end: &str) -> String {
    let mut out = name.split_whitespace().collect::<Vec<_>>().join(" ");
    if let Some(year) = year {
        out.push_str(&format!(" ({year})"));
    }
    if !volume.is_empty() {
        out.push_str(&format!(" {volume}"));
    }
    match (begin.is_empty(), end.is_empty()) {
        (false, false) => out.push_str(&format!(", {begin}:{end}")),
        (false, true) => out.push_str(&format!(", {begin}")),
        _ => {}
    }
    out.trim().to_string()
}

/// Write the given records back out in the corpus' source format, preserving
/// each record's original lines.
pub fn write_export(corpus: &Corpus, ids: &[usize]) -> Vec<u8> {
    let text = match corpus.format {
        Format::Tagged => tagged::write(corpus, ids),
        Format::Tsv => tsv::write(corpus, ids),
    };
    let all_latin1 = !corpus.sources.is_empty()
        && corpus
            .sources
            .iter()
            .all(|s| s.encoding == Encoding::Latin1);
    if all_latin1 && text.chars().all(|c| (c as u32) < 256) {
        text.chars().map(|c| c as u8).collect()
    } else {
        text.into_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "FN Thomson Reuters Web of Science
VR 1.0
PT J
AU SanchezPortal, D
   Ordejon, P
   Artacho, E
   Soler, JM
TI Density-functional method for very large systems with LCAO basis sets
SO INTERNATIONAL JOURNAL OF QUANTUM CHEMISTRY
JI Int. J. Quantum Chem.
J9 INT J QUANTUM CHEM
DE density functional; linear scaling
ID ELECTRONIC-STRUCTURE; ORDER-N
C1 Univ Autonoma Madrid, Dept Fis Mat Condensada, E-28049 Madrid, Spain.
   Univ Oviedo, Dept Fis, E-33007 Oviedo, Spain.
EM jose.soler@uam.es
SC Chemistry, Physical; Mathematics
PY 1997
VL 65
BP 453
EP 461
TC 812
ER

PT J
AU Soler, JM
   Garcia, N
TI Monte Carlo simulation of clusters
SO PHYSICAL REVIEW B
J9 PHYS REV B
PY 1982
TC 12
ER

EF
";

    #[test]
    fn parses_tagged_records() {
        let corpus = parse_export(SAMPLE.as_bytes(), Format::Tagged).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.query_name, "soler_jm");
        let r = &corpus.records[0];
        assert_eq!(
            r.authors.iter().collect::<Vec<_>>(),
            ["sanchezportal_d", "ordejon_p", "artacho_e", "soler_jm"]
        );
        assert_eq!(r.year.iter().collect::<Vec<_>>(), ["1997"]);
        assert_eq!(r.journal.iter().collect::<Vec<_>>(), ["int_j_quantum_chem"]);
        assert_eq!(r.citations, 812);
        assert!(r.keywords.contains("linear") && r.keywords.contains("order"));
        assert!(r.address_words.contains("e28049") && r.address_words.contains("oviedo"));
        assert_eq!(r.emails.iter().collect::<Vec<_>>(), ["jose.soler@uam.es"]);
        assert_eq!(
            r.research_fields.iter().collect::<Vec<_>>(),
            ["chemistry", "physical", "mathematics"]
        );
        assert_eq!(r.display.source, "Int. J. Quantum Chem. (1997) 65, 453:461");
        assert_eq!(
            r.display.authors,
            ["SanchezPortal, D", "Ordejon, P", "Artacho, E", "Soler, JM"]
        );
        assert_eq!(r.raw.first().map(String::as_str), Some("PT J"));
        assert_eq!(r.raw.last().map(String::as_str), Some("ER"));

        let r2 = &corpus.records[1];
        assert!(r2.address_words.is_empty());
        assert!(r2.emails.is_empty());
        assert_eq!(r2.id, 1);
        assert!(corpus.warnings.is_empty());
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let corpus = parse_export(b"", Format::Tagged).unwrap();
        assert!(corpus.is_empty());
        let corpus = parse_export(b"", Format::Tsv).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn missing_query_name_warns_but_keeps_record() {
        let text = "PT J\nAU Soler, JM\nTI One\nER\nPT J\nAU Other, A\nTI Two\nER\nEF\n";
        let corpus = parse_sources(
            &[Source::new("x.txt", text)],
            &ParseOptions {
                query_name: Some("Soler, J. M.".into()),
                ..ParseOptions::default()
            },
        )
        .unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.warnings.len(), 1);
        assert!(corpus.warnings[0].message.contains("record 1"));
    }

    #[test]
    fn latin1_fallback_round_trips() {
        let mut bytes = b"PT J\nAU Ord".to_vec();
        bytes.push(0xE9); // é in Latin-1
        bytes.extend_from_slice(b"jon, P\nER\nEF\n");
        let corpus = parse_export(&bytes, Format::Tagged).unwrap();
        assert_eq!(corpus.sources[0].encoding, Encoding::Latin1);
        assert!(corpus.records[0].authors.contains("ordejon_p"));
        let out = write_export(&corpus, &[0]);
        assert!(out.windows(9).any(|w| w == b"AU Ord\xe9jo"));
    }

    #[test]
    fn mixed_formats_rejected() {
        let err = parse_sources(
            &[
                Source::new("a", "PT J\nAU A, B\nER\n"),
                Source::new("b", "authors\ttitle\nA, B\tx\n"),
            ],
            &ParseOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, ParseError::MixedFormats);
    }

    #[test]
    fn hash_depends_on_content_only() {
        let a = parse_sources(&[Source::new("a", SAMPLE)], &ParseOptions::default()).unwrap();
        let b = parse_sources(&[Source::new("b", SAMPLE)], &ParseOptions::default()).unwrap();
        assert_eq!(a.hash, b.hash);
        let c = parse_sources(
            &[Source::new("a", SAMPLE.replace("812", "813"))],
            &ParseOptions::default(),
        )
        .unwrap();
        assert_ne!(a.hash, c.hash);
    }

    #[test]
    fn bad_times_cited_warns() {
        let corpus = parse_export(b"PT J\nAU A, B\nTC many\nER\n", Format::Tagged).unwrap();
        assert_eq!(corpus.records[0].citations, 0);
        assert_eq!(corpus.warnings.len(), 1);
    }
}
