//! `reqpair` command-line tool.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data or validation
//! errors. Every successful run writes `manifest.json` next to its outputs.

mod config;
mod data;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use reqpair::classifier::{load_model, save_model};
use reqpair::corpus::{generate_pairs, ingest_requirements, read_pairs, synth_corpus, write_pairs, write_requirements, Format, SynthConfig};
use reqpair::eval::report::{report_emit, Report, ReportFormat};
use reqpair::eval::{ftest_5x2cv, run_cross_domain, run_cv, Metric};
use reqpair::features::write_embeddings;
use reqpair::filters::{apply_filter, run_filter, write_annotations, Annotations, Method};
use reqpair::pipeline::{EmbeddingSource, Pipeline, PipelineConfig};
use reqpair::{Label, Mode, PairDataset, PairKey, RequirementPair};
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{Overrides, RunConfig};
use data::{load_dataset, read_annotations, synth_domain, Inputs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl From<reqpair::Error> for CliError {
    fn from(e: reqpair::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "reqpair", version, about = "Requirement pair classification experiments")]
struct Cli {
    /// JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for corpus generation, splits and training.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "REQPAIR_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct DataArgs {
    /// `synth`, `synth:<domain>` or a dataset directory.
    #[arg(long)]
    dataset: Option<String>,
    /// Label scheme: cdn (conflict/duplicate/neutral) or cn (conflict/neutral).
    #[arg(long)]
    mode: Option<Mode>,
    /// Annotation JSONL, merged over any annotations.jsonl in the dataset.
    #[arg(long)]
    annotations: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// Embedding JSONL path, or `builtin` for the hashed n-gram encoder.
    #[arg(long)]
    embeddings: Option<String>,
    /// Dimension of the builtin encoder.
    #[arg(long)]
    dim: Option<usize>,
    /// Filter applied to conflict predictions.
    #[arg(long)]
    method: Option<Method>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate requirements (and optional labeled pairs) and write them in canonical form.
    Ingest {
        #[arg(long)]
        requirements: PathBuf,
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Write every unordered pair of a requirements file, unlabeled.
    GenPairs {
        #[arg(long)]
        requirements: PathBuf,
    },
    /// Generate a labeled synthetic corpus with gold annotations.
    Synth {
        /// Domain name or index.
        #[arg(long, default_value = "uav")]
        domain: String,
        #[arg(long)]
        templates: Option<usize>,
        #[arg(long)]
        per_class: Option<usize>,
        #[arg(long)]
        bait: Option<usize>,
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Check an embedding source against a dataset and write it as JSONL.
    EmbedImport {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Train a classifier on every labeled pair of a dataset.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Predict labels for a dataset's pairs with a trained model.
    Predict {
        #[arg(long)]
        model_file: PathBuf,
        /// Pairs to predict; defaults to the dataset's pairs.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Re-check conflict predictions with a rule-based filter.
    Filter {
        #[arg(long)]
        predictions: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        method: Method,
    },
    /// k-fold cross-validation.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Train on some datasets and evaluate on another.
    CrossDomain {
        /// Training datasets, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        train: Vec<String>,
        #[arg(long)]
        test: String,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Combined 5x2cv F-test between two pipeline configurations.
    Ftest {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Pipeline JSON for A; defaults to the run configuration's pipeline.
        #[arg(long)]
        a: Option<PathBuf>,
        /// Pipeline JSON for B.
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "macro_f1")]
        metric: Metric,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::GenPairs { .. } => "gen-pairs",
            Command::Synth { .. } => "synth",
            Command::EmbedImport { .. } => "embed-import",
            Command::Train { .. } => "train",
            Command::Predict { .. } => "predict",
            Command::Filter { .. } => "filter",
            Command::Eval { .. } => "eval",
            Command::CrossDomain { .. } => "cross-domain",
            Command::Ftest { .. } => "ftest",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: Vec<String>,
    config: &'a RunConfig,
    config_sha256: String,
    seed: u64,
    inputs: &'a BTreeMap<String, String>,
    outputs: &'a [String],
}

/// State shared by every subcommand.
struct Run {
    cfg: RunConfig,
    inputs: Inputs,
    outputs: Vec<String>,
}

impl Run {
    fn out(&mut self, name: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.cfg.out)
            .map_err(|e| CliError::Data(format!("{}: {e}", self.cfg.out.display())))?;
        self.outputs.push(name.to_string());
        Ok(self.cfg.out.join(name))
    }

    fn dataset(&mut self) -> Result<(PairDataset, Annotations), CliError> {
        let spec = self.cfg.dataset()?.to_string();
        let (dataset, mut annotations) =
            load_dataset(&spec, self.cfg.mode, &self.cfg.synth, self.cfg.seed, &mut self.inputs)?;
        if let Some(path) = self.cfg.annotations.clone() {
            annotations.extend(read_annotations(&path, &mut self.inputs)?);
        }
        Ok((dataset, annotations))
    }

    fn pipeline(&mut self, config: PipelineConfig, datasets: &[&PairDataset], ann: Annotations) -> Result<Pipeline, CliError> {
        if let EmbeddingSource::File { path } = &config.embeddings {
            self.inputs.record(path)?;
        }
        Ok(Pipeline::prepare(config, datasets, ann)?)
    }

    fn report(&mut self, report: &Report) -> Result<(), CliError> {
        report_emit(report, &self.out("report.json")?, ReportFormat::Json)?;
        let text = self.out("report.txt")?;
        report_emit(report, &text, ReportFormat::Text)?;
        print!("{}", fs::read_to_string(text)?);
        Ok(())
    }

    fn manifest(&mut self, command: &str, args: Vec<String>) -> Result<(), CliError> {
        let canonical = serde_json::to_vec(&self.cfg)?;
        let path = self.out("manifest.json")?;
        let manifest = Manifest {
            tool: "reqpair",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args,
            config: &self.cfg,
            config_sha256: hex::encode(Sha256::digest(&canonical)),
            seed: self.cfg.seed,
            inputs: &self.inputs.0,
            outputs: &self.outputs,
        };
        let mut body = serde_json::to_string_pretty(&manifest)?;
        body.push('\n');
        fs::write(path, body)?;
        Ok(())
    }
}

fn apply(run: &mut Run, data: Option<DataArgs>, model: Option<ModelArgs>) -> Result<(), CliError> {
    let data = data.unwrap_or_default();
    let model = model.unwrap_or_default();
    run.cfg.apply(Overrides {
        dataset: data.dataset,
        mode: data.mode,
        annotations: data.annotations,
        embeddings: model.embeddings,
        dim: model.dim,
        method: model.method,
        ..Overrides::default()
    })
}

fn labeled_key_map(pairs: &[RequirementPair]) -> Result<BTreeMap<PairKey, Label>, CliError> {
    pairs
        .iter()
        .map(|p| {
            p.label
                .map(|l| (p.key(), l))
                .ok_or_else(|| CliError::Data(format!("prediction for ({}, {}) has no label", p.id1, p.id2)))
        })
        .collect()
}

fn to_pairs(map: &BTreeMap<PairKey, Label>) -> Vec<RequirementPair> {
    map.iter()
        .map(|(k, &l)| RequirementPair {
            id1: k.id1.clone(),
            id2: k.id2.clone(),
            label: Some(l),
        })
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut body = String::new();
    for r in rows {
        body.push_str(&serde_json::to_string(&r)?);
        body.push('\n');
    }
    fs::write(path, body)?;
    Ok(())
}

fn execute(run: &mut Run, command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest { requirements, pairs, mode } => {
            run.inputs.record(&requirements)?;
            let reqs = ingest_requirements(&requirements, Format::from_path(&requirements))?;
            let mut ds = PairDataset::new("ingested", mode.unwrap_or(run.cfg.mode), reqs)?;
            if let Some(p) = pairs {
                run.inputs.record(&p)?;
                ds = ds.with_pairs(read_pairs(&p, Format::from_path(&p))?)?;
                write_pairs(&run.out("pairs.csv")?, &ds.sorted_pairs(), Format::Csv)?;
            }
            write_requirements(&run.out("requirements.jsonl")?, ds.requirements(), Format::Jsonl)?;
            let [c, d, n] = ds.label_counts();
            println!(
                "{} requirements, {} pairs (conflict {c}, duplicate {d}, neutral {n})",
                ds.requirements().len(),
                ds.pairs.len()
            );
        }
        Command::GenPairs { requirements } => {
            run.inputs.record(&requirements)?;
            let reqs = ingest_requirements(&requirements, Format::from_path(&requirements))?;
            let ds = PairDataset::new("generated", run.cfg.mode, reqs)?;
            let pairs = generate_pairs(&ds)?;
            write_pairs(&run.out("pairs.csv")?, &pairs, Format::Csv)?;
            println!("{} requirements, {} pairs", ds.requirements().len(), pairs.len());
        }
        Command::Synth { domain, templates, per_class, bait, mode } => {
            let s = &mut run.cfg.synth;
            s.templates = templates.unwrap_or(s.templates);
            s.per_class = per_class.unwrap_or(s.per_class);
            s.bait = bait.unwrap_or(s.bait);
            if let Some(m) = mode {
                run.cfg.mode = m;
            }
            let corpus = synth_corpus(&SynthConfig {
                n_templates: run.cfg.synth.templates,
                n_per_class: run.cfg.synth.per_class,
                seed: run.cfg.seed,
                domain: synth_domain(&domain)?,
                bait: run.cfg.synth.bait,
            })?;
            let ds = match run.cfg.mode {
                Mode::Cdn => corpus.dataset,
                Mode::Cn => reqpair::corpus::derive_cn(&corpus.dataset),
            };
            write_requirements(&run.out("requirements.csv")?, ds.requirements(), Format::Csv)?;
            write_pairs(&run.out("pairs.csv")?, &ds.sorted_pairs(), Format::Csv)?;
            write_annotations(&run.out("annotations.jsonl")?, &corpus.annotations)?;
            println!("{}: {} requirements, {} pairs", ds.name, ds.requirements().len(), ds.pairs.len());
        }
        Command::EmbedImport { data, model } => {
            apply(run, Some(data), Some(model))?;
            let (ds, ann) = run.dataset()?;
            let pipeline = run.pipeline(run.cfg.pipeline.clone(), &[&ds], ann)?;
            for r in ds.requirements() {
                if pipeline.store().get(&r.id).is_none() {
                    return Err(reqpair::Error::MissingEmbedding(r.id.clone()).into());
                }
            }
            write_embeddings(&run.out("embeddings.jsonl")?, pipeline.store())?;
            println!("{} vectors of dimension {}", pipeline.store().len(), pipeline.store().dim());
        }
        Command::Train { data, model } => {
            apply(run, Some(data), Some(model))?;
            let (ds, ann) = run.dataset()?;
            let pipeline = run.pipeline(run.cfg.pipeline.clone(), &[&ds], ann)?;
            let (trained, report) = pipeline.fit(&ds, &ds.sorted_pairs(), run.cfg.seed)?;
            save_model(&trained, &run.out("model.json")?)?;
            let mut body = serde_json::to_string_pretty(&report)?;
            body.push('\n');
            fs::write(run.out("train_report.json")?, body)?;
            println!(
                "trained on {} pairs: {} epochs, best epoch {}, validation loss {:.4}",
                ds.pairs.len(),
                report.epochs_run,
                report.best_epoch,
                report.val_loss_history.get(report.best_epoch.saturating_sub(1)).copied().unwrap_or(f64::NAN)
            );
        }
        Command::Predict { model_file, pairs, data, model } => {
            apply(run, Some(data), Some(model))?;
            let (ds, ann) = run.dataset()?;
            run.inputs.record(&model_file)?;
            let trained = load_model(&model_file)?;
            let mut config = run.cfg.pipeline.clone();
            config.filter = None;
            let pipeline = run.pipeline(config, &[&ds], ann)?;
            let targets = match pairs {
                Some(p) => {
                    run.inputs.record(&p)?;
                    ds.clone().with_pairs(read_pairs(&p, Format::from_path(&p))?)?.sorted_pairs()
                }
                None => ds.sorted_pairs(),
            };
            let preds = pipeline.predict(&trained, &ds, &targets)?;
            write_pairs(&run.out("predictions.csv")?, &to_pairs(&preds.raw), Format::Csv)?;
            #[derive(Serialize)]
            struct Probs<'a> {
                id1: &'a str,
                id2: &'a str,
                labels: Vec<&'static str>,
                probs: &'a [f64],
            }
            let classes: Vec<&'static str> = trained.classes().iter().map(|l| l.as_str()).collect();
            write_jsonl(
                &run.out("probabilities.jsonl")?,
                preds.probabilities.iter().map(|(k, p)| Probs {
                    id1: &k.id1,
                    id2: &k.id2,
                    labels: classes.clone(),
                    probs: p,
                }),
            )?;
            let n_conflict = preds.raw.values().filter(|&&l| l == Label::Conflict).count();
            println!("{} pairs predicted, {n_conflict} conflicts", preds.raw.len());
        }
        Command::Filter { predictions, data, method } => {
            apply(run, Some(data), None)?;
            run.cfg.pipeline.filter = Some(method);
            let (ds, ann) = run.dataset()?;
            run.inputs.record(&predictions)?;
            let predicted = labeled_key_map(&read_pairs(&predictions, Format::from_path(&predictions))?)?;
            let positives: Vec<RequirementPair> = to_pairs(&predicted)
                .into_iter()
                .filter(|p| p.label == Some(Label::Conflict))
                .collect();
            let decisions = run_filter(method, &positives, &ann, &ds, run.cfg.pipeline.filter_options)?;
            let filtered = apply_filter(&predicted, &decisions)?;
            write_pairs(&run.out("filtered.csv")?, &to_pairs(&filtered), Format::Csv)?;
            write_jsonl(&run.out("decisions.jsonl")?, &decisions)?;
            let kept = filtered.values().filter(|&&l| l == Label::Conflict).count();
            println!("{method}: {} conflict predictions, {kept} kept", positives.len());
        }
        Command::Eval { data, model, k } => {
            apply(run, Some(data), Some(model))?;
            if let Some(k) = k {
                run.cfg.k = k;
            }
            let (ds, ann) = run.dataset()?;
            let pipeline = run.pipeline(run.cfg.pipeline.clone(), &[&ds], ann)?;
            let result = run_cv(&ds, run.cfg.k, &pipeline, run.cfg.seed)?;
            run.report(&Report::Cv(result))?;
        }
        Command::CrossDomain { train, test, mode, annotations, model } => {
            apply(
                run,
                Some(DataArgs {
                    dataset: Some(test.clone()),
                    mode,
                    annotations,
                }),
                Some(model),
            )?;
            let mut sets = Vec::new();
            for spec in &train {
                let (ds, _) = load_dataset(spec, run.cfg.mode, &run.cfg.synth, run.cfg.seed, &mut run.inputs)?;
                sets.push(ds);
            }
            let (test_ds, ann) = run.dataset()?;
            let mut all: Vec<&PairDataset> = sets.iter().collect();
            all.push(&test_ds);
            let pipeline = run.pipeline(run.cfg.pipeline.clone(), &all, ann)?;
            let train_refs: Vec<&PairDataset> = sets.iter().collect();
            let result = run_cross_domain(&train_refs, &test_ds, &pipeline, run.cfg.seed)?;
            run.report(&Report::CrossDomain(result))?;
        }
        Command::Ftest { data, model, a, b, metric } => {
            apply(run, Some(data), Some(model))?;
            let (ds, ann) = run.dataset()?;
            let mut read_config = |path: &Path| -> Result<PipelineConfig, CliError> {
                let body = run.inputs.read(path)?;
                serde_json::from_slice(&body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
            };
            let config_a = match &a {
                Some(p) => read_config(p)?,
                None => run.cfg.pipeline.clone(),
            };
            let config_b = read_config(&b)?;
            let pa = run.pipeline(config_a, &[&ds], ann.clone())?;
            let pb = run.pipeline(config_b, &[&ds], ann)?;
            let result = ftest_5x2cv(&ds, &pa, &pb, metric, run.cfg.seed)?;
            run.report(&Report::Ftest(result))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}\nFor more information, try '--help'.", Cli::command().render_usage());
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli, args: Vec<String>) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    let mut inputs = Inputs::default();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::parse(&inputs.read(path)?, path)?,
        None => RunConfig::default(),
    };
    cfg.apply(Overrides {
        seed: cli.seed,
        out: cli.out,
        ..Overrides::default()
    })?;
    let name = cli.command.name();
    let mut run = Run {
        cfg,
        inputs,
        outputs: Vec::new(),
    };
    execute(&mut run, cli.command)?;
    run.manifest(name, args)
}
