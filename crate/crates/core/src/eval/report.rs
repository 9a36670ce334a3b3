use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cv::{CVResult, CrossDomainResult, Evaluation};
use super::ftest::FTestResult;
use super::metrics::{ConfusionMatrix, MetricsReport};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(Error::InvalidArgument(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Report {
    Cv(CVResult),
    CrossDomain(CrossDomainResult),
    Ftest(FTestResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Document {
    schema: u32,
    #[serde(flatten)]
    report: Report,
}

pub fn to_json(report: &Report) -> Result<String> {
    let doc = Document {
        schema: SCHEMA_VERSION,
        report: report.clone(),
    };
    let mut body = serde_json::to_string_pretty(&doc)?;
    body.push('\n');
    Ok(body)
}

pub fn from_json(body: &str) -> Result<Report> {
    let value: serde_json::Value = serde_json::from_str(body)?;
    match value.get("schema").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        Some(v) => return Err(Error::Version(format!("report schema {v} (expected {SCHEMA_VERSION})"))),
        None => return Err(Error::Version("report has no numeric `schema` field".into())),
    }
    let doc: Document = serde_json::from_value(value)?;
    Ok(doc.report)
}

fn confusion_text(out: &mut String, cm: &ConfusionMatrix) {
    let width = cm
        .counts
        .iter()
        .flatten()
        .map(|c| c.to_string().len())
        .chain(cm.classes.iter().map(|c| c.as_str().len()))
        .max()
        .unwrap_or(1);
    let _ = write!(out, "{:>width$}", "true\\pred");
    for c in &cm.classes {
        let _ = write!(out, "  {:>width$}", c.as_str());
    }
    out.push('\n');
    for (label, row) in cm.classes.iter().zip(&cm.counts) {
        let _ = write!(out, "{:>w$}", label.as_str(), w = width.max(9));
        for c in row {
            let _ = write!(out, "  {c:>width$}");
        }
        out.push('\n');
    }
}

fn metrics_text(out: &mut String, m: &MetricsReport) {
    let _ = writeln!(out, "accuracy {:.4}", m.accuracy);
    let _ = writeln!(
        out,
        "macro P/R/F1 {:.4} / {:.4} / {:.4}",
        m.macro_precision, m.macro_recall, m.macro_f1
    );
    let _ = writeln!(
        out,
        "weighted P/R/F1 {:.4} / {:.4} / {:.4}",
        m.weighted_precision, m.weighted_recall, m.weighted_f1
    );
    for c in &m.per_class {
        let flag = if c.zero_division { " (zero division)" } else { "" };
        let _ = writeln!(
            out,
            "  {:<9} P {:.4} R {:.4} F1 {:.4} support {}{flag}",
            c.label.as_str(),
            c.precision,
            c.recall,
            c.f1,
            c.support
        );
    }
    let _ = writeln!(out, "conflict TP {} FP {}", m.conflict_tp, m.conflict_fp);
}

fn evaluation_text(out: &mut String, e: &Evaluation) {
    let _ = writeln!(out, "train pairs {}, test pairs {}, epochs {}", e.n_train, e.n_test, e.epochs_run);
    metrics_text(out, &e.metrics);
    if let Some(raw) = &e.unfiltered {
        let _ = writeln!(
            out,
            "before filter: conflict TP {} FP {} ({} demoted)",
            raw.conflict_tp, raw.conflict_fp, e.demoted
        );
    }
    confusion_text(out, &e.confusion);
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Cv(r) => {
            let _ = writeln!(out, "dataset {}: {}-fold cross-validation, seed {}", r.dataset, r.k, r.seed);
            for (name, ms) in &r.aggregate {
                let _ = writeln!(out, "{name:<20} {:.4} ± {:.4}", ms.mean, ms.std);
            }
            let _ = writeln!(out, "\nconfusion (summed over folds)");
            confusion_text(&mut out, &r.confusion);
        }
        Report::CrossDomain(r) => {
            let _ = writeln!(out, "train {} -> test {}, seed {}", r.train.join(" + "), r.test, r.seed);
            evaluation_text(&mut out, &r.evaluation);
        }
        Report::Ftest(r) => {
            let _ = writeln!(out, "combined 5x2cv F-test on {}", r.metric);
            let _ = writeln!(
                out,
                "f = {:.6}, F({}, {}) p = {:.6}",
                r.f_statistic, r.dof.0, r.dof.1, r.p_value
            );
            for (i, [a, b]) in r.differences.iter().enumerate() {
                let _ = writeln!(out, "replication {}: {a:+.6} {b:+.6}", i + 1);
            }
        }
    }
    out
}

pub fn render(report: &Report, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => to_json(report),
        ReportFormat::Text => Ok(to_text(report)),
    }
}

pub fn report_emit(report: &Report, path: &Path, format: ReportFormat) -> Result<()> {
    std::fs::write(path, render(report, format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::cv::MeanStd;
    use crate::eval::metrics::{confusion, metrics};
    use crate::Label;

    fn sample() -> Report {
        let t = [Label::Conflict, Label::Neutral, Label::Neutral];
        let p = [Label::Conflict, Label::Conflict, Label::Neutral];
        let cm = confusion(&t, &p, &[Label::Conflict, Label::Neutral]).unwrap();
        let m = metrics(&cm).unwrap();
        let eval = Evaluation {
            n_train: 6,
            n_test: 3,
            epochs_run: 4,
            metrics: m.clone(),
            confusion: cm.clone(),
            unfiltered: None,
            demoted: 0,
        };
        let aggregate = [("accuracy", m.accuracy), ("macro_f1", m.macro_f1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), MeanStd { mean: v, std: 0.1 }))
            .collect();
        Report::Cv(CVResult {
            dataset: "toy".into(),
            k: 2,
            seed: 3,
            folds: vec![eval.clone(), eval],
            aggregate,
            confusion: cm,
        })
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let body = to_json(&r).unwrap();
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["dataset"], "toy");
        assert!(v["aggregate"]["macro_f1"]["mean"].is_number());
        assert!(v["confusion"]["counts"].is_array());
        assert_eq!(from_json(&body).unwrap(), r);
    }

    #[test]
    fn wrong_schema() {
        let body = to_json(&sample()).unwrap().replacen("\"schema\": 1", "\"schema\": 2", 1);
        assert!(matches!(from_json(&body), Err(Error::Version(_))));
    }

    #[test]
    fn one_plus_minus_per_metric() {
        let text = to_text(&sample());
        assert_eq!(text.matches('±').count(), 2);
        assert!(text.contains("conflict"));
    }

    #[test]
    fn unknown_format() {
        assert!("yaml".parse::<ReportFormat>().is_err());
        assert_eq!("JSON".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
    }
}
