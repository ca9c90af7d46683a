//! Zero-distance clusters.

use serde::{Deserialize, Serialize};

use crate::distance::{DistanceMatrix, SymMatrix};
use crate::ingest::Corpus;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// 1-based position in the presentation order
    pub id: usize,
    /// ascending record ids
    pub member_ids: Vec<usize>,
    pub paper_count: usize,
    pub total_citations: u64,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub representative_id: usize,
}

impl Cluster {
    pub fn period(&self) -> String {
        format_period(self.year_min, self.year_max)
    }
}

/// `1981-2006`, a single year, or `----` when no year is known.
pub fn format_period(first: Option<i32>, last: Option<i32>) -> String {
    match (first, last) {
        (Some(a), Some(b)) if a == b => a.to_string(),
        (Some(a), Some(b)) => format!("{a}-{b}"),
        _ => "----".to_string(),
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Connected components of `closed <= tol`, most cited first.
///
/// Ties fall back to paper count (descending) and then to the smallest member
/// id, so the numbering is a deterministic function of the inputs.
pub fn build_clusters(matrix: &DistanceMatrix, corpus: &Corpus, tol: f64) -> Vec<Cluster> {
    let closed = matrix.closed();
    let n = matrix.n;
    let mut sets = DisjointSets::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if closed.get(i, j) <= tol {
                sets.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot_of_root = vec![usize::MAX; n];
    for i in 0..n {
        let root = sets.find(i);
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot_of_root[root]].push(i);
    }

    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|members| {
            let years: Vec<i32> = members
                .iter()
                .filter_map(|&m| corpus.records[m].year_value())
                .collect();
            Cluster {
                id: 0,
                paper_count: members.len(),
                total_citations: members.iter().map(|&m| corpus.records[m].citations).sum(),
                year_min: years.iter().min().copied(),
                year_max: years.iter().max().copied(),
                representative_id: pick_representative(&members, corpus),
                member_ids: members,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.total_citations
            .cmp(&a.total_citations)
            .then(b.paper_count.cmp(&a.paper_count))
            .then(a.member_ids[0].cmp(&b.member_ids[0]))
    });
    for (index, cluster) in clusters.iter_mut().enumerate() {
        cluster.id = index + 1;
    }
    clusters
}

/// The most cited member; ties go to the earliest year, then the lowest id.
/// Members without a year sort after dated ones.
pub fn pick_representative(member_ids: &[usize], corpus: &Corpus) -> usize {
    *member_ids
        .iter()
        .min_by_key(|&&id| {
            let r = &corpus.records[id];
            (
                std::cmp::Reverse(r.citations),
                r.year_value().unwrap_or(i32::MAX),
                id,
            )
        })
        .expect("cluster has at least one member")
}

/// Single-linkage distance: the smallest closed distance over member pairs.
pub fn cluster_distance(a: &Cluster, b: &Cluster, matrix: &DistanceMatrix) -> f64 {
    let closed = matrix.closed();
    a.member_ids
        .iter()
        .flat_map(|&i| b.member_ids.iter().map(move |&j| closed.get(i, j)))
        .fold(f64::INFINITY, f64::min)
}

/// Clusters plus their pairwise single-linkage distances.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterSet {
    clusters: Vec<Cluster>,
    linkage: SymMatrix,
}

impl ClusterSet {
    pub fn new(clusters: Vec<Cluster>, matrix: &DistanceMatrix) -> Self {
        let k = clusters.len();
        let mut linkage = SymMatrix::filled(k, 0.0);
        for a in 0..k {
            for b in (a + 1)..k {
                linkage.set(a, b, cluster_distance(&clusters[a], &clusters[b], matrix));
            }
        }
        ClusterSet { clusters, linkage }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Look up by 1-based id.
    pub fn get(&self, id: usize) -> Option<&Cluster> {
        id.checked_sub(1).and_then(|i| self.clusters.get(i))
    }

    /// Distance between two clusters by id; both ids must exist.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.linkage.get(a - 1, b - 1)
    }
}
