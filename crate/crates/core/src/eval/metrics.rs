use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<Label>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn zeros(classes: &[Label]) -> Self {
        ConfusionMatrix {
            classes: classes.to_vec(),
            counts: vec![vec![0; classes.len()]; classes.len()],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn index(&self, label: Label) -> Result<usize> {
        self.classes
            .iter()
            .position(|&c| c == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn add(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if self.classes != other.classes {
            return Err(Error::ModeMismatch("confusion matrices over different classes".into()));
        }
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
        Ok(())
    }
}

pub fn confusion(truth: &[Label], predicted: &[Label], classes: &[Label]) -> Result<ConfusionMatrix> {
    if truth.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    let mut cm = ConfusionMatrix::zeros(classes);
    for (&t, &p) in truth.iter().zip(predicted) {
        let (ti, pi) = (cm.index(t)?, cm.index(p)?);
        cm.counts[ti][pi] += 1;
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Set when any of the three scores hit a zero denominator.
    pub zero_division: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub conflict_tp: u64,
    pub conflict_fp: u64,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Per-class, macro and support-weighted precision/recall/F1. Zero
/// denominators give 0 and set `zero_division`; macro averages still run
/// over every class.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if cm.classes.is_empty() || total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let k = cm.classes.len();
    let mut per_class = Vec::with_capacity(k);
    for (i, &label) in cm.classes.iter().enumerate() {
        let tp = cm.counts[i][i];
        let support: u64 = cm.counts[i].iter().sum();
        let predicted: u64 = cm.counts.iter().map(|row| row[i]).sum();
        let (precision, zp) = ratio(tp, predicted);
        let (recall, zr) = ratio(tp, support);
        let (f1, zf) = if precision + recall == 0.0 {
            (0.0, true)
        } else {
            (2.0 * precision * recall / (precision + recall), false)
        };
        per_class.push(ClassMetrics {
            label,
            precision,
            recall,
            f1,
            support,
            zero_division: zp || zr || zf,
        });
    }
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / k as f64;
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        per_class.iter().map(|c| f(c) * c.support as f64).sum::<f64>() / total as f64
    };
    let trace: u64 = (0..k).map(|i| cm.counts[i][i]).sum();
    let (conflict_tp, conflict_fp) = match cm.classes.iter().position(|&c| c == Label::Conflict) {
        Some(i) => {
            let predicted: u64 = cm.counts.iter().map(|row| row[i]).sum();
            (cm.counts[i][i], predicted - cm.counts[i][i])
        }
        None => (0, 0),
    };
    Ok(MetricsReport {
        accuracy: trace as f64 / total as f64,
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        weighted_precision: weighted(|c| c.precision),
        weighted_recall: weighted(|c| c.recall),
        weighted_f1: weighted(|c| c.f1),
        per_class,
        conflict_tp,
        conflict_fp,
    })
}

/// A scalar read off a [`MetricsReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    MacroPrecision,
    MacroRecall,
    MacroF1,
    WeightedPrecision,
    WeightedRecall,
    WeightedF1,
    ConflictPrecision,
    ConflictRecall,
    ConflictF1,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::Accuracy,
        Metric::MacroPrecision,
        Metric::MacroRecall,
        Metric::MacroF1,
        Metric::WeightedPrecision,
        Metric::WeightedRecall,
        Metric::WeightedF1,
        Metric::ConflictPrecision,
        Metric::ConflictRecall,
        Metric::ConflictF1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::MacroPrecision => "macro_precision",
            Metric::MacroRecall => "macro_recall",
            Metric::MacroF1 => "macro_f1",
            Metric::WeightedPrecision => "weighted_precision",
            Metric::WeightedRecall => "weighted_recall",
            Metric::WeightedF1 => "weighted_f1",
            Metric::ConflictPrecision => "conflict_precision",
            Metric::ConflictRecall => "conflict_recall",
            Metric::ConflictF1 => "conflict_f1",
        }
    }

    pub fn of(self, r: &MetricsReport) -> f64 {
        let conflict = || r.per_class.iter().find(|c| c.label == Label::Conflict);
        match self {
            Metric::Accuracy => r.accuracy,
            Metric::MacroPrecision => r.macro_precision,
            Metric::MacroRecall => r.macro_recall,
            Metric::MacroF1 => r.macro_f1,
            Metric::WeightedPrecision => r.weighted_precision,
            Metric::WeightedRecall => r.weighted_recall,
            Metric::WeightedF1 => r.weighted_f1,
            Metric::ConflictPrecision => conflict().map_or(0.0, |c| c.precision),
            Metric::ConflictRecall => conflict().map_or(0.0, |c| c.recall),
            Metric::ConflictF1 => conflict().map_or(0.0, |c| c.f1),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{s}`")))
    }
}
