//! Pairwise record distances and their shortest-path closure.
//!
//! The raw distance of two records is `log10(N_D)` plus the log10 tail
//! probability of the coincidences observed in every field, so it is maximal
//! (`log10 N_D`) for records sharing nothing and negative for records sharing
//! far more than chance allows. Negative values are clamped to zero and the
//! clamped matrix is closed under path relaxation, which lets two groups of
//! papers connect through a bridging paper.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coincidence::{field_coincidence, set_coincidence, FieldModel};
use crate::field::Field;
use crate::ingest::{Corpus, PublicationRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistanceError {
    #[error("cannot build a distance matrix over an empty corpus")]
    EmptyCorpus,
}

/// How far path relaxation is carried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureMode {
    /// all-pairs shortest paths
    #[default]
    FixedPoint,
    /// one relaxation sweep over intermediate records
    SinglePass,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceOptions {
    /// drop the shared query name from both author sets before comparing
    pub exclude_query_name: bool,
    pub closure: ClosureMode,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            exclude_query_name: true,
            closure: ClosureMode::FixedPoint,
        }
    }
}

/// Dense square matrix kept symmetric by its setter.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn filled(n: usize, value: f64) -> Self {
        SymMatrix {
            n,
            data: vec![value; n * n],
        }
    }

    /// Build from a full row-major square matrix; panics when it is not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        SymMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    /// CSV with record ids as row and column headers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "id")?;
        for j in 0..self.n {
            write!(out, ",{j}")?;
        }
        writeln!(out)?;
        for i in 0..self.n {
            write!(out, "{i}")?;
            for v in self.row(i) {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    pub n: usize,
    pub raw: SymMatrix,
    pub clamped: SymMatrix,
    closed: Option<SymMatrix>,
}

impl DistanceMatrix {
    /// Closed distances; panics if [`close_distances`] has not been applied.
    pub fn closed(&self) -> &SymMatrix {
        self.closed
            .as_ref()
            .expect("close_distances must run before closed distances are read")
    }

    pub fn is_closed(&self) -> bool {
        self.closed.is_some()
    }

    /// Wrap an externally computed clamped matrix (tests, tools).
    pub fn from_clamped(clamped: SymMatrix) -> Self {
        DistanceMatrix {
            n: clamped.len(),
            raw: clamped.clone(),
            clamped,
            closed: None,
        }
    }
}

/// Raw distance between two records.
///
/// `excluded_author` is removed from both author sets first; pass the corpus
/// query name to ignore the coincidence every record shares by construction.
pub fn pair_distance(
    rec_i: &PublicationRecord,
    rec_j: &PublicationRecord,
    model: &FieldModel,
    excluded_author: Option<&str>,
) -> f64 {
    let mut total = model.log10_n_docs;
    for field in Field::ALL {
        total += match (field, excluded_author) {
            (Field::Authors, Some(query)) => author_coincidence(rec_i, rec_j, query, model),
            _ => field_coincidence(rec_i.words(field), rec_j.words(field), field, model),
        };
    }
    total
}

fn author_coincidence(
    rec_i: &PublicationRecord,
    rec_j: &PublicationRecord,
    query: &str,
    model: &FieldModel,
) -> f64 {
    let count = |r: &PublicationRecord| r.authors.iter().filter(|a| *a != query).count() as u64;
    let n_i = count(rec_i);
    let n_j = count(rec_j);
    if n_i == 0 || n_j == 0 {
        return 0.0;
    }
    let common = rec_i
        .authors
        .iter()
        .filter(|a| *a != query && rec_j.authors.contains(*a))
        .count() as u64;
    set_coincidence(common, n_i, n_j, model.universe(Field::Authors))
}

/// Raw and clamped distances over every pair of records.
pub fn build_matrix(
    corpus: &Corpus,
    model: &FieldModel,
    options: &DistanceOptions,
) -> Result<DistanceMatrix, DistanceError> {
    let n = corpus.len();
    if n == 0 {
        return Err(DistanceError::EmptyCorpus);
    }
    let excluded = options
        .exclude_query_name
        .then_some(corpus.query_name.as_str())
        .filter(|q| !q.is_empty());
    let records = &corpus.records;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| pair_distance(&records[i], &records[j], model, excluded))
                .collect()
        })
        .collect();

    let mut raw = SymMatrix::filled(n, 0.0);
    let mut clamped = SymMatrix::filled(n, 0.0);
    for (i, row) in rows.iter().enumerate() {
        for (offset, &d) in row.iter().enumerate() {
            let j = i + offset;
            raw.set(i, j, d);
            clamped.set(i, j, if i == j { 0.0 } else { d.max(0.0) });
        }
    }
    Ok(DistanceMatrix {
        n,
        raw,
        clamped,
        closed: None,
    })
}

/// Fill the closed layer according to `mode`.
pub fn close_distances(mut matrix: DistanceMatrix, mode: ClosureMode) -> DistanceMatrix {
    let closed = match mode {
        ClosureMode::FixedPoint => shortest_paths(&matrix.clamped),
        ClosureMode::SinglePass => relax_once(&matrix.clamped),
    };
    matrix.closed = Some(closed);
    matrix
}

/// One sweep of `d_ij = min_k (d_ik + d_kj)` with `k` over all records.
pub fn relax_once(m: &SymMatrix) -> SymMatrix {
    let n = m.len();
    let mut out = SymMatrix::filled(n, 0.0);
    for i in 0..n {
        for j in i..n {
            let best = (0..n)
                .map(|k| m.get(i, k) + m.get(k, j))
                .fold(f64::INFINITY, f64::min);
            out.set(i, j, best);
        }
    }
    out
}

/// Floyd-Warshall over the complete graph; rows are relaxed in parallel for
/// each intermediate record.
pub fn shortest_paths(m: &SymMatrix) -> SymMatrix {
    let n = m.len();
    let mut data = m.data.clone();
    for i in 0..n {
        data[i * n + i] = data[i * n + i].min(0.0);
    }
    let mut pivot = vec![0.0; n];
    for k in 0..n {
        pivot.copy_from_slice(&data[k * n..(k + 1) * n]);
        data.par_chunks_mut(n.max(1)).for_each(|row| {
            let via = row[k];
            if via.is_infinite() {
                return;
            }
            for (cell, &p) in row.iter_mut().zip(&pivot) {
                let candidate = via + p;
                if candidate < *cell {
                    *cell = candidate;
                }
            }
        });
    }
    SymMatrix { n, data }
}
