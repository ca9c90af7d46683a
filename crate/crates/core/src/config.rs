//! Run configuration, read from a TOML file.
//!
//! ```toml
//! [model]
//! log10_n_docs = 8.0
//!
//! [model.field_sizes]
//! authors = 4.0
//! journal = 2.0
//!
//! [distance]
//! exclude_query_name = true
//! closure = "fixed_point"
//!
//! [clustering]
//! tolerance = 1e-9
//!
//! [session]
//! cutoff = 3.0
//!
//! [ingest]
//! stopwords = ["a", "the", "of"]
//! ```
//!
//! Every key is optional; missing keys take the built-in defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::DEFAULT_TOLERANCE;
use crate::coincidence::FieldModel;
use crate::distance::DistanceOptions;
use crate::error::{Error, Result};
use crate::ingest::Tokenizer;
use crate::session::DEFAULT_CUTOFF;

/// Everything that determines the clusters of a corpus.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub model: FieldModel,
    pub distance: DistanceOptions,
    pub clustering: ClusteringOptions,
    pub ingest: IngestOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringOptions {
    pub tolerance: f64,
}

impl Default for ClusteringOptions {
    fn default() -> Self {
        ClusteringOptions {
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestOptions {
    /// replaces the built-in title stopword list when present
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<Vec<String>>,
}

impl IngestOptions {
    pub fn tokenizer(&self) -> Tokenizer {
        match &self.stopwords {
            Some(words) => Tokenizer::with_stopwords(words),
            None => Tokenizer::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionOptions {
    pub cutoff: f64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(flatten)]
    pub settings: Settings,
    pub session: SessionOptions,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.settings.validate()?;
        if !(self.session.cutoff.is_finite() && self.session.cutoff > 0.0) {
            return Err(Error::Config(format!(
                "cutoff must be positive, got {}",
                self.session.cutoff
            )));
        }
        Ok(())
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let tol = self.clustering.tolerance;
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::Config(format!("tolerance must be >= 0, got {tol}")));
        }
        Ok(())
    }
}
