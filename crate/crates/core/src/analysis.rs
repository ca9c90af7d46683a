//! Parse, measure, close and cluster in one step.

use crate::cluster::{build_clusters, ClusterSet};
use crate::config::Settings;
use crate::distance::{build_matrix, close_distances, DistanceMatrix};
use crate::error::Result;
use crate::ingest::{parse_sources, Corpus, Format, ParseOptions, Source};

/// A corpus with its distance matrix and clusters; immutable once built.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub corpus: Corpus,
    pub settings: Settings,
    pub matrix: DistanceMatrix,
    pub clusters: ClusterSet,
}

impl Analysis {
    pub fn new(corpus: Corpus, settings: Settings) -> Result<Self> {
        settings.validate()?;
        let matrix = build_matrix(&corpus, &settings.model, &settings.distance)?;
        let matrix = close_distances(matrix, settings.distance.closure);
        let clusters = build_clusters(&matrix, &corpus, settings.clustering.tolerance);
        let clusters = ClusterSet::new(clusters, &matrix);
        Ok(Analysis {
            corpus,
            settings,
            matrix,
            clusters,
        })
    }

    pub fn from_sources(
        sources: &[Source],
        format: Option<Format>,
        query_name: Option<&str>,
        settings: Settings,
    ) -> Result<Self> {
        let options = ParseOptions {
            format,
            query_name: query_name.map(str::to_string),
            tokenizer: settings.ingest.tokenizer(),
        };
        let corpus = parse_sources(sources, &options)?;
        Analysis::new(corpus, settings)
    }
}
