use std::collections::BTreeMap;

use super::tags::{self, Join, Slot, END_OF_FILE, END_OF_RECORD, HEADER_TAGS};
use super::{Corpus, ParseError, ParsedFile, RawRecord};

const DEFAULT_HEADER: [&str; 2] = ["FN Thomson Reuters Web of Science", "VR 1.0"];

enum Line<'a> {
    Blank,
    Continuation(&'a str),
    Tag(&'a str, &'a str),
}

fn classify(line: &str) -> Option<Line<'_>> {
    if line.trim().is_empty() {
        return Some(Line::Blank);
    }
    if line.starts_with(' ') || line.starts_with('\t') {
        return Some(Line::Continuation(line.trim()));
    }
    let mut chars = line.char_indices();
    let is_tag_char = |c: char| c.is_ascii_uppercase() || c.is_ascii_digit();
    match (chars.next(), chars.next(), chars.next()) {
        (Some((_, a)), Some((_, b)), rest) if is_tag_char(a) && is_tag_char(b) => match rest {
            None => Some(Line::Tag(&line[..2], "")),
            Some((_, ' ')) => Some(Line::Tag(&line[..2], line[3..].trim())),
            _ => None,
        },
        _ => None,
    }
}

struct Open {
    start_line: usize,
    raw: Vec<String>,
    values: BTreeMap<Slot, (Join, Vec<String>)>,
    current: Option<Slot>,
}

impl Open {
    fn push(&mut self, slot: Option<Slot>, join: Join, value: &str) {
        self.current = slot;
        if let Some(slot) = slot {
            let entry = self.values.entry(slot).or_insert((join, Vec::new()));
            if !value.is_empty() {
                entry.1.push(value.to_string());
            }
        }
    }

    fn finish(self) -> RawRecord {
        let fields = self
            .values
            .into_iter()
            .map(|(slot, (join, parts))| {
                let sep = match (slot, join) {
                    (_, Join::Lines) => "\n",
                    // SC and WC both feed the subject slot
                    (Slot::Subject, _) => "; ",
                    _ => " ",
                };
                (slot, parts.join(sep))
            })
            .collect();
        RawRecord {
            line: self.start_line,
            fields,
            raw: self.raw,
        }
    }
}

pub(crate) fn parse(text: &str, source_name: &str) -> Result<ParsedFile, ParseError> {
    let error = |line: usize, message: String| ParseError::Malformed {
        source_name: source_name.to_string(),
        line,
        message,
    };

    let mut header = Vec::new();
    let mut records = Vec::new();
    let mut open: Option<Open> = None;

    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let kind = classify(line).ok_or_else(|| {
            error(
                line_no,
                format!("expected a two-letter tag, found `{line}`"),
            )
        })?;

        match (&mut open, kind) {
            (Some(rec), Line::Blank) => rec.raw.push(line.to_string()),
            (None, Line::Blank) => {}
            (Some(rec), Line::Continuation(value)) => {
                rec.raw.push(line.to_string());
                if let Some(slot) = rec.current {
                    let join = rec.values.get(&slot).map(|v| v.0).unwrap_or(Join::Wrapped);
                    rec.push(Some(slot), join, value);
                }
            }
            (None, Line::Continuation(_)) => {
                return Err(error(line_no, "continuation line outside a record".into()));
            }
            (Some(_), Line::Tag(tag, _)) if tag == END_OF_RECORD => {
                let mut rec = open.take().expect("record is open");
                rec.raw.push(line.to_string());
                records.push(rec.finish());
            }
            (Some(rec), Line::Tag(tag, _)) if tag == END_OF_FILE || HEADER_TAGS.contains(&tag) => {
                return Err(error(
                    rec.start_line,
                    format!("record has no `{END_OF_RECORD}` tag before `{tag}` on line {line_no}"),
                ));
            }
            (Some(rec), Line::Tag(tag, value)) => {
                rec.raw.push(line.to_string());
                match tags::tagged_slot(tag) {
                    Some((slot, join)) => rec.push(Some(slot), join, value),
                    None => rec.push(None, Join::Wrapped, value),
                }
            }
            (None, Line::Tag(tag, _)) if tag == END_OF_FILE => break,
            (None, Line::Tag(tag, _)) if HEADER_TAGS.contains(&tag) => {
                header.push(line.to_string())
            }
            (None, Line::Tag(tag, _)) if tag == END_OF_RECORD => {
                return Err(error(
                    line_no,
                    format!("`{END_OF_RECORD}` without an open record"),
                ));
            }
            (None, Line::Tag(tag, value)) => {
                let mut rec = Open {
                    start_line: line_no,
                    raw: vec![line.to_string()],
                    values: BTreeMap::new(),
                    current: None,
                };
                match tags::tagged_slot(tag) {
                    Some((slot, join)) => rec.push(Some(slot), join, value),
                    None => rec.push(None, Join::Wrapped, value),
                }
                open = Some(rec);
            }
        }
    }

    if let Some(rec) = open {
        return Err(error(
            rec.start_line,
            format!("record has no `{END_OF_RECORD}` tag before end of input"),
        ));
    }
    Ok(ParsedFile {
        header,
        records,
        warnings: Vec::new(),
    })
}

pub(crate) fn write(corpus: &Corpus, ids: &[usize]) -> String {
    let header: Vec<&str> = match corpus.sources.iter().find(|s| !s.header.is_empty()) {
        Some(source) => source.header.iter().map(String::as_str).collect(),
        None => DEFAULT_HEADER.to_vec(),
    };
    let mut out = String::new();
    for line in header {
        out.push_str(line);
        out.push('\n');
    }
    for &id in ids {
        for line in &corpus.records[id].raw {
            out.push_str(line);
            out.push('\n');
        }
        out.push('\n');
    }
    out.push_str(END_OF_FILE);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_line(text: &str) -> usize {
        match parse(text, "t").map(|_| ()).unwrap_err() {
            ParseError::Malformed { line, .. } => line,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_end_tag_names_record_start() {
        assert_eq!(err_line("FN x\nPT J\nAU A, B\nER\n\nPT J\nAU C, D\n"), 6);
        assert_eq!(err_line("PT J\nAU A, B\nEF\n"), 1);
    }

    #[test]
    fn garbage_line_is_an_error() {
        assert_eq!(err_line("PT J\nthis is not a tag\nER\n"), 2);
        assert_eq!(err_line("   orphan continuation\n"), 1);
        assert_eq!(err_line("ER\n"), 1);
    }

    #[test]
    fn continuation_and_crlf() {
        let parsed = parse(
            "PT J\r\nTI A very long\r\n   title here\r\nAU A, B\r\n   C, D\r\nER\r\n",
            "t",
        )
        .unwrap();
        let rec = &parsed.records[0];
        assert_eq!(rec.fields[&Slot::Title], "A very long title here");
        assert_eq!(rec.fields[&Slot::Authors], "A, B\nC, D");
        assert_eq!(
            rec.raw,
            [
                "PT J",
                "TI A very long",
                "   title here",
                "AU A, B",
                "   C, D",
                "ER"
            ]
        );
    }

    #[test]
    fn unknown_tags_kept_in_raw() {
        let parsed = parse("PT J\nZZ something\n   more\nER\n", "t").unwrap();
        assert_eq!(parsed.records[0].raw.len(), 4);
        assert!(parsed.records[0].fields.is_empty());
    }

    #[test]
    fn lines_after_end_of_file_are_ignored() {
        let parsed = parse("PT J\nER\nEF\nanything goes here\n", "t").unwrap();
        assert_eq!(parsed.records.len(), 1);
    }
}
