use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{confusion, metrics, ConfusionMatrix, Metric, MetricsReport};
use crate::corpus::stratified_kfold;
use crate::corpus::{Label, PairDataset, PairKey, RequirementPair};
use crate::error::{Error, Result};
use crate::pipeline::{derive_seed, Pipeline, Predictions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single value.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MeanStd { mean: 0.0, std: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        MeanStd { mean, std }
    }
}

/// Scores of one trained model on one held-out set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub n_train: usize,
    pub n_test: usize,
    pub epochs_run: usize,
    pub metrics: MetricsReport,
    pub confusion: ConfusionMatrix,
    /// Scores before filtering, present when a filter is configured.
    pub unfiltered: Option<MetricsReport>,
    /// Number of conflict predictions the filter demoted to neutral.
    pub demoted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVResult {
    pub dataset: String,
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Evaluation>,
    pub aggregate: BTreeMap<String, MeanStd>,
    /// Sum of the per-fold confusion matrices.
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossDomainResult {
    pub train: Vec<String>,
    pub test: String,
    pub seed: u64,
    pub evaluation: Evaluation,
}

fn truth(pairs: &[RequirementPair]) -> Result<Vec<Label>> {
    pairs
        .iter()
        .map(|p| p.label.ok_or_else(|| Error::Unlabeled(p.id1.clone(), p.id2.clone())))
        .collect()
}

fn score(
    classes: &[Label],
    test: &[RequirementPair],
    preds: &Predictions,
    n_train: usize,
    epochs_run: usize,
    filtered: bool,
) -> Result<Evaluation> {
    let truth = truth(test)?;
    let pick = |m: &BTreeMap<PairKey, Label>| -> Vec<Label> { test.iter().map(|p| m[&p.key()]).collect() };
    let cm = confusion(&truth, &pick(&preds.filtered), classes)?;
    let unfiltered = if filtered {
        Some(metrics(&confusion(&truth, &pick(&preds.raw), classes)?)?)
    } else {
        None
    };
    let demoted = preds
        .raw
        .iter()
        .filter(|(k, &l)| l == Label::Conflict && preds.filtered[*k] != Label::Conflict)
        .count();
    Ok(Evaluation {
        n_train,
        n_test: test.len(),
        epochs_run,
        metrics: metrics(&cm)?,
        confusion: cm,
        unfiltered,
        demoted,
    })
}

/// Trains on `train` and scores on `test`, both drawn from `dataset`.
pub fn evaluate_split(
    pipeline: &Pipeline,
    dataset: &PairDataset,
    train: &[RequirementPair],
    test: &[RequirementPair],
    seed: u64,
) -> Result<Evaluation> {
    let (model, report) = pipeline.fit(dataset, train, seed)?;
    let preds = pipeline.predict(&model, dataset, test)?;
    score(
        dataset.mode.classes(),
        test,
        &preds,
        train.len(),
        report.epochs_run,
        pipeline.config.filter.is_some(),
    )
}

/// Stratified k-fold cross-validation. Folds run in parallel; each fold's
/// training seed is derived from `seed` and the fold index, so results do
/// not depend on scheduling or on the order of the input pairs.
pub fn run_cv(dataset: &PairDataset, k: usize, pipeline: &Pipeline, seed: u64) -> Result<CVResult> {
    let plan = stratified_kfold(dataset, k, seed)?;
    let folds = (0..k)
        .into_par_iter()
        .map(|fold| {
            let (train, test) = plan.split(dataset, fold);
            evaluate_split(pipeline, dataset, &train, &test, derive_seed(seed, "fold", fold as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = ConfusionMatrix::zeros(dataset.mode.classes());
    for f in &folds {
        total.add(&f.confusion)?;
    }
    let aggregate = Metric::ALL
        .iter()
        .map(|m| {
            let values: Vec<f64> = folds.iter().map(|f| m.of(&f.metrics)).collect();
            (m.name().to_string(), MeanStd::of(&values))
        })
        .collect();
    Ok(CVResult {
        dataset: dataset.name.clone(),
        k,
        seed,
        folds,
        aggregate,
        confusion: total,
    })
}

/// Trains one model on the union of `train_sets` and scores it on every
/// pair of `test_set`.
pub fn run_cross_domain(
    train_sets: &[&PairDataset],
    test_set: &PairDataset,
    pipeline: &Pipeline,
    seed: u64,
) -> Result<CrossDomainResult> {
    if let Some(d) = train_sets.iter().find(|d| d.mode != test_set.mode) {
        return Err(Error::ModeMismatch(format!(
            "training set `{}` is {} but test set `{}` is {}",
            d.name, d.mode, test_set.name, test_set.mode
        )));
    }
    let test_ids: BTreeSet<&str> = test_set.requirements().iter().map(|r| r.id.as_str()).collect();
    for d in train_sets {
        if let Some(r) = d.requirements().iter().find(|r| test_ids.contains(r.id.as_str())) {
            return Err(Error::Overlap(r.id.clone()));
        }
    }
    let train = PairDataset::concat("train", train_sets)?;
    let train_pairs = train.sorted_pairs();
    let test_pairs = test_set.sorted_pairs();
    let (model, report) = pipeline.fit(&train, &train_pairs, derive_seed(seed, "cross-domain", 0))?;
    let preds = pipeline.predict(&model, test_set, &test_pairs)?;
    let evaluation = score(
        test_set.mode.classes(),
        &test_pairs,
        &preds,
        train_pairs.len(),
        report.epochs_run,
        pipeline.config.filter.is_some(),
    )?;
    Ok(CrossDomainResult {
        train: train_sets.iter().map(|d| d.name.clone()).collect(),
        test: test_set.name.clone(),
        seed,
        evaluation,
    })
}
