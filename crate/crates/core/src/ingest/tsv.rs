use std::collections::BTreeMap;

use super::tags::{self, Slot, TSV_COLUMNS};
use super::{Corpus, ParseError, ParseWarning, ParsedFile, RawRecord};

pub(crate) fn parse(text: &str, source_name: &str) -> Result<ParsedFile, ParseError> {
    let error = |line: usize, message: String| ParseError::Malformed {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());

    let Some((header_index, header_line)) = lines.next() else {
        return Ok(ParsedFile {
            header: Vec::new(),
            records: Vec::new(),
            warnings: Vec::new(),
        });
    };
    let columns: Vec<Option<Slot>> = header_line.split('\t').map(tags::tsv_slot).collect();
    if columns.iter().all(Option::is_none) {
        return Err(error(
            header_index + 1,
            "header row names none of the known columns".to_string(),
        ));
    }
    let mut warnings = Vec::new();
    for (name, slot) in header_line.split('\t').zip(&columns) {
        if slot.is_none() {
            warnings.push(ParseWarning {
                source_name: source_name.to_string(),
                line: header_index + 1,
                message: format!("ignoring unknown column `{name}`"),
            });
        }
    }

    let mut records = Vec::new();
    for (index, line) in lines {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() > columns.len() {
            return Err(error(
                index + 1,
                format!(
                    "{} cells but the header has {} columns",
                    cells.len(),
                    columns.len()
                ),
            ));
        }
        let mut fields = BTreeMap::new();
        for (cell, slot) in cells.iter().zip(&columns) {
            if let Some(slot) = slot {
                fields.insert(*slot, cell.trim().to_string());
            }
        }
        records.push(RawRecord {
            line: index + 1,
            fields,
            raw: vec![line.to_string()],
        });
    }
    Ok(ParsedFile {
        header: vec![header_line.to_string()],
        records,
        warnings,
    })
}

/// Records keep their source rows when every selected record shares one
/// header; otherwise rows are re-laid out under the canonical columns.
pub(crate) fn write(corpus: &Corpus, ids: &[usize]) -> String {
    let header_of = |id: usize| corpus.sources[corpus.records[id].source].header.first();
    let first = ids.first().and_then(|&id| header_of(id));
    let shared = ids.iter().all(|&id| header_of(id) == first);

    let mut out = String::new();
    match (shared, first) {
        (true, Some(header)) => {
            out.push_str(header);
            out.push('\n');
            for &id in ids {
                out.push_str(&corpus.records[id].raw[0]);
                out.push('\n');
            }
        }
        _ => {
            let canonical: Vec<&str> = TSV_COLUMNS.iter().map(|(name, _)| *name).collect();
            out.push_str(&canonical.join("\t"));
            out.push('\n');
            for &id in ids {
                let record = &corpus.records[id];
                let source_cols: Vec<&str> = header_of(id)
                    .map(|h| h.split('\t').collect())
                    .unwrap_or_default();
                let cells: Vec<&str> = record.raw[0].split('\t').collect();
                let row: Vec<&str> = canonical
                    .iter()
                    .map(|name| {
                        source_cols
                            .iter()
                            .position(|c| c.trim().eq_ignore_ascii_case(name))
                            .and_then(|i| cells.get(i).copied())
                            .unwrap_or("")
                    })
                    .collect();
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
    }
    out
}
