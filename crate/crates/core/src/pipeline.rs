//! End-to-end pair classification: embeddings → pair features → trained
//! head → optional rule-based filter.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classifier::{self, MLPModel, TrainConfig, TrainReport, DEFAULT_DROPOUT, DEFAULT_HIDDEN_UNITS};
use crate::corpus::{Label, PairDataset, PairKey, RequirementPair};
use crate::error::{Error, Result};
use crate::features::{self, EmbeddingStore};
use crate::filters::{self, Annotations, FilterDecision, FilterOptions, Method};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmbeddingSource {
    Builtin { dim: usize, seed: u64 },
    File { path: PathBuf },
}

impl Default for EmbeddingSource {
    fn default() -> Self {
        EmbeddingSource::Builtin { dim: 128, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub embeddings: EmbeddingSource,
    pub hidden_units: usize,
    pub dropout_rate: f64,
    pub train: TrainConfig,
    pub filter: Option<Method>,
    pub filter_options: FilterOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            embeddings: EmbeddingSource::default(),
            hidden_units: DEFAULT_HIDDEN_UNITS,
            dropout_rate: DEFAULT_DROPOUT,
            train: TrainConfig::default(),
            filter: None,
            filter_options: FilterOptions::default(),
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-stage seed derived from a base seed, a stage name and an index.
pub fn derive_seed(base: u64, stage: &str, index: u64) -> u64 {
    mix(mix(base ^ features::seeded_fnv1a(0, stage.as_bytes())).wrapping_add(index))
}

/// Classifier output for a set of pairs, before and after filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub raw: BTreeMap<PairKey, Label>,
    pub probabilities: BTreeMap<PairKey, Vec<f64>>,
    pub decisions: Vec<FilterDecision>,
    pub filtered: BTreeMap<PairKey, Label>,
}

/// A configured pipeline with its resolved embeddings and annotations.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    store: EmbeddingStore,
    annotations: Annotations,
}

impl Pipeline {
    pub fn new(config: PipelineConfig, store: EmbeddingStore, annotations: Annotations) -> Self {
        Pipeline {
            config,
            store,
            annotations,
        }
    }

    /// Resolves the embedding source over every requirement of `datasets`.
    pub fn prepare(config: PipelineConfig, datasets: &[&PairDataset], annotations: Annotations) -> Result<Self> {
        let store = match &config.embeddings {
            EmbeddingSource::Builtin { dim, seed } => {
                let reqs: Vec<_> = datasets.iter().flat_map(|d| d.requirements().iter().cloned()).collect();
                features::builtin_embed(&reqs, *dim, *seed)?
            }
            EmbeddingSource::File { path } => features::load_embeddings(path)?,
        };
        Ok(Pipeline::new(config, store, annotations))
    }

    pub fn store(&self) -> &EmbeddingStore {
        &self.store
    }

    pub fn annotations(&self) -> &Annotations {
        &self.annotations
    }

    fn labeled(pairs: &[RequirementPair]) -> Result<Vec<Label>> {
        pairs
            .iter()
            .map(|p| p.label.ok_or_else(|| Error::Unlabeled(p.id1.clone(), p.id2.clone())))
            .collect()
    }

    /// Trains a fresh head on `pairs`. Initialization and shuffling seeds are
    /// derived from `seed`.
    pub fn fit(&self, dataset: &PairDataset, pairs: &[RequirementPair], seed: u64) -> Result<(MLPModel, TrainReport)> {
        let labels = Self::labeled(pairs)?;
        for l in &labels {
            if dataset.mode.class_index(*l).is_none() {
                return Err(Error::LabelNotInMode(l.to_string()));
            }
        }
        let feats = features::pair_features(&self.store, pairs)?;
        let xs: Vec<&[f64]> = feats.iter().map(|f| f.values.as_slice()).collect();
        let mut model = classifier::init_model(
            3 * self.store.dim(),
            self.config.hidden_units,
            dataset.mode.classes().len(),
            derive_seed(seed, "init", 0),
        )?;
        model.dropout_rate = self.config.dropout_rate;
        let cfg = TrainConfig {
            seed: derive_seed(seed, "train", 0),
            ..self.config.train.clone()
        };
        classifier::train(model, &xs, &labels, &cfg)
    }

    /// Predicts `pairs` and, when a filter is configured, re-checks the
    /// conflict predictions with it.
    pub fn predict(&self, model: &MLPModel, dataset: &PairDataset, pairs: &[RequirementPair]) -> Result<Predictions> {
        let feats = features::pair_features(&self.store, pairs)?;
        let xs: Vec<&[f64]> = feats.iter().map(|f| f.values.as_slice()).collect();
        let out = model.predict(&xs)?;
        let mut raw = BTreeMap::new();
        let mut probabilities = BTreeMap::new();
        for (p, (label, probs)) in pairs.iter().zip(out) {
            raw.insert(p.key(), label);
            probabilities.insert(p.key(), probs);
        }
        let (decisions, filtered) = match self.config.filter {
            None => (Vec::new(), raw.clone()),
            Some(method) => {
                let positives: Vec<RequirementPair> = pairs
                    .iter()
                    .filter(|p| raw[&p.key()] == Label::Conflict)
                    .cloned()
                    .collect();
                let decisions = filters::run_filter(
                    method,
                    &positives,
                    &self.annotations,
                    dataset,
                    self.config.filter_options,
                )?;
                let filtered = filters::apply_filter(&raw, &decisions)?;
                (decisions, filtered)
            }
        };
        Ok(Predictions {
            raw,
            probabilities,
            decisions,
            filtered,
        })
    }
}
