use std::path::{Path, PathBuf};

use reqpair::filters::Method;
use reqpair::pipeline::{EmbeddingSource, PipelineConfig};
use reqpair::Mode;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSettings {
    pub templates: usize,
    pub per_class: usize,
    pub bait: usize,
}

impl Default for SynthSettings {
    fn default() -> Self {
        SynthSettings {
            templates: 6,
            per_class: 200,
            bait: 0,
        }
    }
}

/// Everything a run depends on. Resolution order: built-in defaults, then
/// the `--config` file, then command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<String>,
    pub mode: Mode,
    pub annotations: Option<PathBuf>,
    pub k: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub synth: SynthSettings,
    pub pipeline: PipelineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            mode: Mode::Cdn,
            annotations: None,
            k: 5,
            seed: 0,
            out: PathBuf::from("out"),
            synth: SynthSettings::default(),
            pipeline: PipelineConfig::default(),
        }
    }
}

/// Flag values that override config keys when present.
#[derive(Debug, Default)]
pub struct Overrides {
    pub dataset: Option<String>,
    pub mode: Option<Mode>,
    pub annotations: Option<PathBuf>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub embeddings: Option<String>,
    pub dim: Option<usize>,
    pub method: Option<Method>,
}

impl RunConfig {
    pub fn parse(body: &[u8], path: &Path) -> Result<Self, CliError> {
        serde_json::from_slice(body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), CliError> {
        if let Some(d) = o.dataset {
            self.dataset = Some(d);
        }
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(a) = o.annotations {
            self.annotations = Some(a);
        }
        if let Some(k) = o.k {
            self.k = k;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(out) = o.out {
            self.out = out;
        }
        if let Some(m) = o.method {
            self.pipeline.filter = Some(m);
        }
        match (o.embeddings.as_deref(), o.dim) {
            (Some("builtin"), dim) => {
                let seed = match self.pipeline.embeddings {
                    EmbeddingSource::Builtin { seed, .. } => seed,
                    EmbeddingSource::File { .. } => 0,
                };
                let dim = dim.unwrap_or(match self.pipeline.embeddings {
                    EmbeddingSource::Builtin { dim, .. } => dim,
                    EmbeddingSource::File { .. } => 128,
                });
                self.pipeline.embeddings = EmbeddingSource::Builtin { dim, seed };
            }
            (Some(path), None) => {
                self.pipeline.embeddings = EmbeddingSource::File { path: PathBuf::from(path) };
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Usage("--dim applies only to --embeddings builtin".into()));
            }
            (None, Some(dim)) => match &mut self.pipeline.embeddings {
                EmbeddingSource::Builtin { dim: d, .. } => *d = dim,
                EmbeddingSource::File { .. } => {
                    return Err(CliError::Usage("--dim applies only to builtin embeddings".into()));
                }
            },
            (None, None) => {}
        }
        Ok(())
    }

    pub fn dataset(&self) -> Result<&str, CliError> {
        self.dataset
            .as_deref()
            .ok_or_else(|| CliError::Usage("a dataset is required: pass --dataset or set `dataset` in the config".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let mut cfg: RunConfig =
            serde_json::from_str(r#"{"dataset": "a", "k": 3, "pipeline": {"embeddings": {"kind": "builtin", "dim": 64, "seed": 9}}}"#)
                .unwrap();
        cfg.apply(Overrides {
            k: Some(4),
            dim: Some(32),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(cfg.dataset.as_deref(), Some("a"));
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.pipeline.embeddings, EmbeddingSource::Builtin { dim: 32, seed: 9 });
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"folds": 3}"#).is_err());
    }

    #[test]
    fn embeddings_file_flag() {
        let mut cfg = RunConfig::default();
        cfg.apply(Overrides {
            embeddings: Some("vecs.jsonl".into()),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(cfg.pipeline.embeddings, EmbeddingSource::File { path: "vecs.jsonl".into() });
        let err = cfg.apply(Overrides {
            dim: Some(8),
            ..Overrides::default()
        });
        assert!(matches!(err, Err(CliError::Usage(_))));
    }
}
