use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use reqpair::corpus::{derive_cn, domain_name, ingest_pairs, ingest_requirements, synth_corpus, Format, SynthConfig, N_DOMAINS};
use reqpair::filters::{load_annotations, Annotations};
use reqpair::{Mode, PairDataset};
use sha2::{Digest, Sha256};

use crate::config::SynthSettings;
use crate::CliError;

/// SHA-256 digests of every file a run reads, keyed by path.
#[derive(Debug, Default)]
pub struct Inputs(pub BTreeMap<String, String>);

impl Inputs {
    pub fn record(&mut self, path: &Path) -> Result<(), CliError> {
        self.read(path).map(drop)
    }

    /// Reads a file once, recording its digest and returning the bytes.
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        self.0
            .insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }
}

pub fn synth_domain(spec: &str) -> Result<usize, CliError> {
    if let Ok(i) = spec.parse::<usize>() {
        if i < N_DOMAINS {
            return Ok(i);
        }
    }
    (0..N_DOMAINS)
        .find(|&i| domain_name(i) == Some(spec))
        .ok_or_else(|| {
            let names: Vec<_> = (0..N_DOMAINS).filter_map(domain_name).collect();
            CliError::Usage(format!("unknown synthetic domain `{spec}`; expected one of {}", names.join(", ")))
        })
}

fn find(dir: &Path, stem: &str, required: bool) -> Result<Option<PathBuf>, CliError> {
    for ext in ["csv", "jsonl"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.is_file() {
            return Ok(Some(p));
        }
    }
    if required {
        return Err(CliError::Data(format!(
            "{}: no {stem}.csv or {stem}.jsonl",
            dir.display()
        )));
    }
    Ok(None)
}

fn index(records: impl IntoIterator<Item = reqpair::filters::AnnotationRecord>) -> Annotations {
    records.into_iter().map(|r| (r.id.clone(), r)).collect()
}

pub fn read_annotations(path: &Path, inputs: &mut Inputs) -> Result<Annotations, CliError> {
    inputs.record(path)?;
    let loaded = load_annotations(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(loaded.records)
}

/// Resolves a dataset spec: `synth`, `synth:<domain>` or a directory holding
/// `requirements.{csv,jsonl}`, `pairs.{csv,jsonl}` and optionally
/// `annotations.jsonl`.
pub fn load_dataset(
    spec: &str,
    mode: Mode,
    synth: &SynthSettings,
    seed: u64,
    inputs: &mut Inputs,
) -> Result<(PairDataset, Annotations), CliError> {
    let domain = match spec.split_once(':') {
        Some(("synth", d)) => Some(synth_domain(d)?),
        _ if spec == "synth" => Some(0),
        _ => None,
    };
    if let Some(domain) = domain {
        let corpus = synth_corpus(&SynthConfig {
            n_templates: synth.templates,
            n_per_class: synth.per_class,
            seed,
            domain,
            bait: synth.bait,
        })?;
        let dataset = match mode {
            Mode::Cdn => corpus.dataset,
            Mode::Cn => derive_cn(&corpus.dataset),
        };
        return Ok((dataset, index(corpus.annotations)));
    }
    let dir = Path::new(spec);
    if !dir.is_dir() {
        return Err(CliError::Data(format!(
            "dataset `{spec}` is neither `synth`, `synth:<domain>` nor a directory"
        )));
    }
    let reqs_path = find(dir, "requirements", true)?.expect("required file");
    inputs.record(&reqs_path)?;
    let reqs = ingest_requirements(&reqs_path, Format::from_path(&reqs_path))?;
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    let mut dataset = PairDataset::new(name, mode, reqs)?;
    if let Some(pairs_path) = find(dir, "pairs", false)? {
        inputs.record(&pairs_path)?;
        dataset = ingest_pairs(&pairs_path, dataset)?;
    }
    let ann_path = dir.join("annotations.jsonl");
    let annotations = if ann_path.is_file() {
        read_annotations(&ann_path, inputs)?
    } else {
        Annotations::new()
    };
    Ok((dataset, annotations))
}
