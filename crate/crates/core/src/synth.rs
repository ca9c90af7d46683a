//! Synthetic corpora with known authorship, for measuring cluster quality.
//!
//! Every synthetic author owns a coauthor pool, an affiliation, a topical
//! vocabulary, a few journals and subject categories, and a career span;
//! some authors move halfway through and start over with new ones.
//! Papers sample from those pools, with a configurable share of words drawn
//! from vocabularies common to all authors. All records list the same query
//! author, so they can only be told apart by the other fields. The corpus is
//! written as a TSV export and parsed back through the regular ingest path.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::Cluster;
use crate::distance::DistanceMatrix;
use crate::ingest::{parse_sources, Corpus, Format, ParseOptions, Source};

pub const QUERY_AUTHOR: &str = "Soler, JM";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    pub n_authors: usize,
    pub papers_min: usize,
    pub papers_max: usize,
    /// distinct collaborators of each author
    pub coauthor_pool: usize,
    /// collaborators drawn from the pool for each paper
    pub coauthors_per_paper: usize,
    pub address_words_per_author: usize,
    pub address_words_per_paper: usize,
    pub topic_words_per_author: usize,
    pub title_words_per_paper: usize,
    pub keyword_pool_per_author: usize,
    pub keywords_per_paper: usize,
    pub journals_per_author: usize,
    pub subjects_per_author: usize,
    /// size of the shared vocabularies
    pub title_vocabulary: usize,
    pub keyword_vocabulary: usize,
    pub address_vocabulary: usize,
    pub journal_count: usize,
    pub subject_count: usize,
    pub country_count: usize,
    /// probability that a title or keyword word comes from the shared pool
    pub common_word_rate: f64,
    /// probability that a paper carries the author's e-mail
    pub email_rate: f64,
    /// probability that an author changes affiliation and topic halfway
    /// through the career
    pub career_move_rate: f64,
    /// probability that a paper after a move continues the former topic and
    /// collaborators under the new affiliation
    pub carry_over_rate: f64,
    pub career_years: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n_authors: 5,
            papers_min: 20,
            papers_max: 20,
            coauthor_pool: 6,
            coauthors_per_paper: 2,
            address_words_per_author: 6,
            address_words_per_paper: 5,
            topic_words_per_author: 25,
            title_words_per_paper: 7,
            keyword_pool_per_author: 12,
            keywords_per_paper: 4,
            journals_per_author: 3,
            subjects_per_author: 2,
            title_vocabulary: 60,
            keyword_vocabulary: 60,
            address_vocabulary: 400,
            journal_count: 80,
            subject_count: 40,
            country_count: 10,
            common_word_rate: 0.15,
            email_rate: 0.3,
            career_move_rate: 0.4,
            carry_over_rate: 0.25,
            career_years: 15,
            seed: 20_070_101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid generator parameters: {0}")]
pub struct InvalidParams(pub String);

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        let counts = [
            ("n_authors", self.n_authors),
            ("papers_min", self.papers_min),
            ("papers_max", self.papers_max),
            ("coauthor_pool", self.coauthor_pool),
            ("coauthors_per_paper", self.coauthors_per_paper),
            ("address_words_per_author", self.address_words_per_author),
            ("address_words_per_paper", self.address_words_per_paper),
            ("topic_words_per_author", self.topic_words_per_author),
            ("title_words_per_paper", self.title_words_per_paper),
            ("keyword_pool_per_author", self.keyword_pool_per_author),
            ("keywords_per_paper", self.keywords_per_paper),
            ("journals_per_author", self.journals_per_author),
            ("subjects_per_author", self.subjects_per_author),
            ("title_vocabulary", self.title_vocabulary),
            ("keyword_vocabulary", self.keyword_vocabulary),
            ("address_vocabulary", self.address_vocabulary),
            ("journal_count", self.journal_count),
            ("subject_count", self.subject_count),
            ("country_count", self.country_count),
            ("career_years", self.career_years),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(InvalidParams(format!("{name} must be at least 1")));
        }
        let subsets = [
            (
                "coauthors_per_paper",
                self.coauthors_per_paper,
                self.coauthor_pool,
            ),
            (
                "address_words_per_paper",
                self.address_words_per_paper,
                self.address_words_per_author,
            ),
            (
                "keywords_per_paper",
                self.keywords_per_paper,
                self.keyword_pool_per_author,
            ),
            (
                "journals_per_author",
                self.journals_per_author,
                self.journal_count,
            ),
            (
                "subjects_per_author",
                self.subjects_per_author,
                self.subject_count,
            ),
            ("papers_min", self.papers_min, self.papers_max),
        ];
        for (name, part, whole) in subsets {
            if part > whole {
                return Err(InvalidParams(format!(
                    "{name} ({part}) exceeds its pool ({whole})"
                )));
            }
        }
        for (name, rate) in [
            ("common_word_rate", self.common_word_rate),
            ("email_rate", self.email_rate),
            ("career_move_rate", self.career_move_rate),
            ("carry_over_rate", self.carry_over_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(InvalidParams(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ren", "sa", "tu", "vel", "do", "ga", "ne", "pi", "ros", "bi", "fa", "har",
    "jo", "ku", "lin", "mor", "nu", "pe", "ri", "sol", "ta",
];

/// Deterministic pronounceable word of at least four letters.
fn word(index: usize, salt: usize) -> String {
    let mut n = index * 7 + salt;
    let mut out = String::new();
    loop {
        out.push_str(SYLLABLES[n % SYLLABLES.len()]);
        n /= SYLLABLES.len();
        if n == 0 {
            break;
        }
    }
    if out.len() < 4 {
        out.push_str("ix");
    }
    out
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

struct Phase {
    coauthors: Vec<String>,
    address: Vec<String>,
    postal_code: String,
    country: String,
    email: String,
    topics: Vec<String>,
    keywords: Vec<String>,
    journals: Vec<String>,
    subjects: Vec<String>,
}

struct Author {
    /// one phase, or two when the author moves mid-career
    phases: Vec<Phase>,
    start_year: usize,
    move_year: usize,
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, pool: &[T], k: usize) -> Vec<T> {
    pool.choose_multiple(rng, k.min(pool.len()))
        .cloned()
        .collect()
}

fn make_phase(
    rng: &mut ChaCha8Rng,
    index: usize,
    params: &GeneratorParams,
    shared: &Shared,
) -> Phase {
    Phase {
        coauthors: (0..params.coauthor_pool)
            .map(|_| {
                let surname = capitalize(&word(rng.random_range(0..1_000_000), 3));
                let a = (b'A' + rng.random_range(0..26)) as char;
                let b = (b'A' + rng.random_range(0..26)) as char;
                format!("{surname}, {a}{b}")
            })
            .collect(),
        address: pick(rng, &shared.address_words, params.address_words_per_author),
        postal_code: format!("E-{:05}", rng.random_range(1000..99_999)),
        country: shared.countries.choose(rng).cloned().unwrap_or_default(),
        email: format!(
            "{}.{}@{}.edu",
            word(index, 1),
            word(rng.random_range(0..10_000), 2),
            word(rng.random_range(0..10_000), 5)
        ),
        topics: (0..params.topic_words_per_author)
            .map(|_| word(rng.random_range(0..10_000_000), 11))
            .collect(),
        keywords: (0..params.keyword_pool_per_author)
            .map(|_| word(rng.random_range(0..10_000_000), 13))
            .collect(),
        journals: pick(rng, &shared.journals, params.journals_per_author),
        subjects: pick(rng, &shared.subjects, params.subjects_per_author),
    }
}

fn make_author(index: usize, params: &GeneratorParams, shared: &Shared) -> Author {
    let mut rng = ChaCha8Rng::seed_from_u64(
        params.seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let mut phases = vec![make_phase(&mut rng, index, params, shared)];
    if rng.random_bool(params.career_move_rate) {
        phases.push(make_phase(&mut rng, index, params, shared));
    }
    let start_year = rng.random_range(1965..2000);
    Author {
        phases,
        start_year,
        move_year: start_year + params.career_years / 2,
    }
}

struct Shared {
    title_words: Vec<String>,
    keyword_words: Vec<String>,
    address_words: Vec<String>,
    journals: Vec<String>,
    subjects: Vec<String>,
    countries: Vec<String>,
}

impl Shared {
    fn new(params: &GeneratorParams) -> Self {
        let list = |n: usize, salt: usize| (0..n).map(|i| word(i, salt)).collect::<Vec<_>>();
        Shared {
            title_words: list(params.title_vocabulary, 17),
            keyword_words: list(params.keyword_vocabulary, 19),
            address_words: list(params.address_vocabulary, 23),
            journals: (0..params.journal_count)
                .map(|i| {
                    format!(
                        "J {} {}",
                        word(i, 29).to_uppercase(),
                        word(i, 31).to_uppercase()
                    )
                })
                .collect(),
            subjects: list(params.subject_count, 37)
                .iter()
                .map(|s| capitalize(s))
                .collect(),
            countries: list(params.country_count, 41)
                .iter()
                .map(|s| s.to_uppercase())
                .collect(),
        }
    }
}

fn words_from(
    rng: &mut ChaCha8Rng,
    own: &[String],
    common: &[String],
    k: usize,
    common_rate: f64,
) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(k);
    let mut guard = 0;
    while out.len() < k && guard < 50 * k {
        guard += 1;
        let pool = if rng.random_bool(common_rate) {
            common
        } else {
            own
        };
        if let Some(w) = pool.choose(rng) {
            if !out.contains(w) {
                out.push(w.clone());
            }
        }
    }
    out
}

/// A generated corpus as TSV text plus the author of every row.
pub fn generate_tsv(params: &GeneratorParams) -> Result<(String, Vec<usize>), InvalidParams> {
    params.validate()?;
    let shared = Shared::new(params);
    let authors: Vec<Author> = (0..params.n_authors)
        .map(|i| make_author(i, params, &shared))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut rows: Vec<(usize, String)> = Vec::new();
    for (author_id, author) in authors.iter().enumerate() {
        let count = rng.random_range(params.papers_min..=params.papers_max);
        for _ in 0..count {
            let year = author.start_year + rng.random_range(0..params.career_years);
            let phase = usize::from(year >= author.move_year && author.phases.len() > 1);
            let place = &author.phases[phase];
            // papers after a move sometimes still belong to the former line of work
            let work = if phase == 1 && rng.random_bool(params.carry_over_rate) {
                &author.phases[0]
            } else {
                place
            };
            let mut names = vec![QUERY_AUTHOR.to_string()];
            names.extend(pick(&mut rng, &work.coauthors, params.coauthors_per_paper));
            names.shuffle(&mut rng);
            let title = words_from(
                &mut rng,
                &work.topics,
                &shared.title_words,
                params.title_words_per_paper,
                params.common_word_rate,
            );
            let keywords = words_from(
                &mut rng,
                &work.keywords,
                &shared.keyword_words,
                params.keywords_per_paper,
                params.common_word_rate,
            );
            let mut address = pick(&mut rng, &place.address, params.address_words_per_paper);
            address.push(place.postal_code.clone());
            address.push(place.country.clone());
            let email = if rng.random_bool(params.email_rate) {
                place.email.clone()
            } else {
                String::new()
            };
            let journal = work.journals.choose(&mut rng).cloned().unwrap_or_default();
            let citations = (rng.random::<f64>().powi(3) * 200.0) as u64;
            let row = format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                names.join("; "),
                capitalize(&title.join(" ")),
                journal,
                keywords.join("; "),
                address
                    .iter()
                    .map(|w| w.to_uppercase())
                    .collect::<Vec<_>>()
                    .join(" "),
                email,
                work.subjects.join("; "),
                year,
                citations
            );
            rows.push((author_id, row));
        }
    }
    rows.shuffle(&mut rng);

    let mut text = String::from(
        "authors\ttitle\tsource\tkeywords\taddresses\temail\tsubject\tyear\ttimes_cited\n",
    );
    let mut truth = Vec::with_capacity(rows.len());
    for (author_id, row) in rows {
        text.push_str(&row);
        text.push('\n');
        truth.push(author_id);
    }
    Ok((text, truth))
}

/// Generate and parse a corpus; `truth[record_id]` is the author id.
pub fn generate(params: &GeneratorParams) -> Result<(Corpus, Vec<usize>), InvalidParams> {
    let (text, truth) = generate_tsv(params)?;
    let corpus = parse_sources(
        &[Source::new("synthetic.tsv", text)],
        &ParseOptions {
            format: Some(Format::Tsv),
            query_name: Some(QUERY_AUTHOR.to_string()),
            ..ParseOptions::default()
        },
    )
    .expect("generated TSV parses");
    Ok((corpus, truth))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub records: usize,
    pub authors: usize,
    pub clusters: usize,
    pub purity: f64,
    pub split_rate: f64,
    pub false_positive_pairs: u64,
    pub false_negative_pairs: u64,
}

impl Metrics {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        let _ = writeln!(out, "records,{}", self.records);
        let _ = writeln!(out, "authors,{}", self.authors);
        let _ = writeln!(out, "clusters,{}", self.clusters);
        let _ = writeln!(out, "purity,{}", self.purity);
        let _ = writeln!(out, "split_rate,{}", self.split_rate);
        let _ = writeln!(out, "false_positive_pairs,{}", self.false_positive_pairs);
        let _ = writeln!(out, "false_negative_pairs,{}", self.false_negative_pairs);
        out
    }
}

pub fn truth_csv(truth: &[usize]) -> String {
    let mut out = String::from("record_id,author_id\n");
    for (record, author) in truth.iter().enumerate() {
        let _ = writeln!(out, "{record},{author}");
    }
    out
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Score a partition of record ids against ground-truth authors.
pub fn evaluate_partition(partition: &[Vec<usize>], truth: &[usize]) -> Metrics {
    let mut per_author: HashMap<usize, u64> = HashMap::new();
    for &a in truth {
        *per_author.entry(a).or_default() += 1;
    }
    let mut majority_total = 0u64;
    let mut same_pairs_within = 0u64;
    let mut all_pairs_within = 0u64;
    for members in partition {
        let mut counts: HashMap<usize, u64> = HashMap::new();
        for &m in members {
            *counts.entry(truth[m]).or_default() += 1;
        }
        majority_total += counts.values().copied().max().unwrap_or(0);
        same_pairs_within += counts.values().map(|&c| pairs(c)).sum::<u64>();
        all_pairs_within += pairs(members.len() as u64);
    }
    let records: usize = partition.iter().map(Vec::len).sum();
    let authors = per_author.len();
    let same_author_pairs: u64 = per_author.values().map(|&c| pairs(c)).sum();
    Metrics {
        records,
        authors,
        clusters: partition.len(),
        purity: if records == 0 {
            1.0
        } else {
            majority_total as f64 / records as f64
        },
        split_rate: if authors == 0 {
            0.0
        } else {
            (partition.len() as f64 - authors as f64).max(0.0) / authors as f64
        },
        false_positive_pairs: all_pairs_within - same_pairs_within,
        false_negative_pairs: same_author_pairs - same_pairs_within,
    }
}

pub fn evaluate(clusters: &[Cluster], truth: &[usize]) -> Metrics {
    let partition: Vec<Vec<usize>> = clusters.iter().map(|c| c.member_ids.clone()).collect();
    evaluate_partition(&partition, truth)
}

/// Separation of same-author and different-author pairs in a distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapStatistics {
    pub same_author_pairs: u64,
    pub same_author_closed_zero: u64,
    pub different_author_pairs: u64,
    /// different-author pairs with raw distance above the threshold
    pub different_author_far: u64,
}

impl GapStatistics {
    pub fn far_fraction(&self) -> f64 {
        if self.different_author_pairs == 0 {
            1.0
        } else {
            self.different_author_far as f64 / self.different_author_pairs as f64
        }
    }
}

pub fn gap_statistics(
    matrix: &DistanceMatrix,
    truth: &[usize],
    threshold: f64,
    tol: f64,
) -> GapStatistics {
    let mut stats = GapStatistics {
        same_author_pairs: 0,
        same_author_closed_zero: 0,
        different_author_pairs: 0,
        different_author_far: 0,
    };
    for i in 0..matrix.n {
        for j in (i + 1)..matrix.n {
            if truth[i] == truth[j] {
                stats.same_author_pairs += 1;
                if matrix.closed().get(i, j) <= tol {
                    stats.same_author_closed_zero += 1;
                }
            } else {
                stats.different_author_pairs += 1;
                if matrix.raw.get(i, j) > threshold {
                    stats.different_author_far += 1;
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coincidence::log_p_tail;
    use proptest::prelude::*;

    #[test]
    fn single_author_truth() {
        let params = GeneratorParams {
            n_authors: 1,
            ..GeneratorParams::default()
        };
        let (corpus, truth) = generate(&params).unwrap();
        assert_eq!(corpus.len(), 20);
        assert!(truth.iter().all(|&a| a == 0));
        assert!(corpus.warnings.is_empty());
        assert!(corpus
            .records
            .iter()
            .all(|r| r.authors.contains("soler_jm")));
    }

    #[test]
    fn same_seed_same_bytes() {
        let params = GeneratorParams::default();
        assert_eq!(
            generate_tsv(&params).unwrap(),
            generate_tsv(&params).unwrap()
        );
        let other = GeneratorParams {
            seed: 7,
            ..GeneratorParams::default()
        };
        assert_ne!(
            generate_tsv(&params).unwrap().0,
            generate_tsv(&other).unwrap().0
        );
    }

    #[test]
    fn coauthor_sharing_matches_configured_rate() {
        // a career move swaps the collaborator pool, so keep authors in place
        let params = GeneratorParams {
            n_authors: 40,
            career_move_rate: 0.0,
            ..GeneratorParams::default()
        };
        let (corpus, truth) = generate(&params).unwrap();
        let (mut pairs, mut sharing) = (0u64, 0u64);
        for i in 0..corpus.len() {
            for j in (i + 1)..corpus.len() {
                if truth[i] != truth[j] {
                    continue;
                }
                pairs += 1;
                let a = &corpus.records[i].authors;
                let b = &corpus.records[j].authors;
                if a.iter().any(|x| x != "soler_jm" && b.contains(x)) {
                    sharing += 1;
                }
            }
        }
        // two draws of k collaborators from a pool of m share one with
        // probability P(X >= 1) under the hypergeometric law
        let k = params.coauthors_per_paper as u64;
        let m = params.coauthor_pool as u64;
        let expected = 10f64.powf(log_p_tail(1, k, k, m).unwrap());
        let observed = sharing as f64 / pairs as f64;
        assert!(
            (observed - expected).abs() < 0.05,
            "observed {observed}, expected {expected}"
        );
    }

    #[test]
    fn invalid_params() {
        let bad = GeneratorParams {
            coauthors_per_paper: 9,
            ..GeneratorParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = GeneratorParams {
            email_rate: 1.5,
            ..GeneratorParams::default()
        };
        assert!(generate(&bad).is_err());
        let bad = GeneratorParams {
            n_authors: 0,
            ..GeneratorParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn perfect_and_merged_partitions() {
        let truth = [0, 0, 1, 1];
        let m = evaluate_partition(&[vec![0, 1], vec![2, 3]], &truth);
        assert_eq!(
            (
                m.purity,
                m.false_positive_pairs,
                m.false_negative_pairs,
                m.split_rate
            ),
            (1.0, 0, 0, 0.0)
        );
        let m = evaluate_partition(&[vec![0, 1, 2, 3]], &truth);
        assert_eq!(m.purity, 0.5);
        assert_eq!(m.false_positive_pairs, 4);
        let m = evaluate_partition(&[vec![0], vec![1], vec![2, 3]], &truth);
        assert_eq!(m.false_negative_pairs, 1);
        assert_eq!(m.split_rate, 0.5);
        let m = evaluate_partition(&[vec![0, 1, 2]], &[0, 0, 0]);
        assert_eq!(
            (m.purity, m.false_positive_pairs, m.false_negative_pairs),
            (1.0, 0, 0)
        );
    }

    proptest! {
        #[test]
        fn metrics_invariant_under_relabeling(
            truth in proptest::collection::vec(0usize..4, 1..30),
            labels in proptest::collection::vec(0usize..5, 30),
            shift in 1usize..7,
        ) {
            let n = truth.len();
            let build = |f: &dyn Fn(usize) -> usize| {
                let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
                for (i, &label) in labels.iter().enumerate().take(n) {
                    groups.entry(f(label)).or_default().push(i);
                }
                groups.into_values().collect::<Vec<_>>()
            };
            let original = evaluate_partition(&build(&|l| l), &truth);
            let mut relabeled_partition = build(&|l| (l + shift) % 5);
            relabeled_partition.reverse();
            let renamed_truth: Vec<usize> = truth.iter().map(|a| (a * 7 + shift) % 100).collect();
            let relabeled = evaluate_partition(&relabeled_partition, &renamed_truth);
            prop_assert_eq!(original, relabeled);
        }
    }
}
