//! Requirements, labeled requirement pairs and datasets.

mod folds;
mod io;
mod synth;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use folds::{stratified_kfold, FoldPlan};
pub use io::{
    ingest_pairs, ingest_requirements, read_pairs, write_pairs, write_requirements, Format,
};
pub use synth::{domain_name, synth_corpus, SynthConfig, SynthCorpus, N_DOMAINS};

pub const MAX_TEXT_CHARS: usize = 10_000;

/// A single requirement sentence taken from an SRS document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub id: String,
    pub doc_id: String,
    pub text: String,
}

impl Requirement {
    pub fn new(id: impl Into<String>, doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Requirement {
            id: id.into(),
            doc_id: doc_id.into(),
            text: text.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::InvalidArgument("requirement id is empty".into()));
        }
        if self.text.trim().is_empty() {
            return Err(Error::EmptyText(self.id.clone()));
        }
        let len = self.text.chars().count();
        if len > MAX_TEXT_CHARS {
            return Err(Error::TextTooLong {
                id: self.id.clone(),
                len,
            });
        }
        Ok(())
    }
}

/// Pair label. The declaration order is the class index order used by the
/// classifier and for argmax tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Conflict,
    Duplicate,
    Neutral,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Conflict, Label::Duplicate, Label::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Conflict => "conflict",
            Label::Duplicate => "duplicate",
            Label::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conflict" => Ok(Label::Conflict),
            "duplicate" => Ok(Label::Duplicate),
            "neutral" => Ok(Label::Neutral),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

/// Labeling scheme: three-way (conflict/duplicate/neutral) or two-way
/// (conflict/neutral).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cdn,
    Cn,
}

impl Mode {
    pub fn classes(self) -> &'static [Label] {
        match self {
            Mode::Cdn => &[Label::Conflict, Label::Duplicate, Label::Neutral],
            Mode::Cn => &[Label::Conflict, Label::Neutral],
        }
    }

    pub fn class_index(self, label: Label) -> Option<usize> {
        self.classes().iter().position(|&c| c == label)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cdn => "cdn",
            Mode::Cn => "cn",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cdn" => Ok(Mode::Cdn),
            "cn" => Ok(Mode::Cn),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

/// Canonically ordered unordered pair of requirement ids (`id1 < id2`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey {
    pub id1: String,
    pub id2: String,
}

impl PairKey {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(PairKey { id1: a, id2: b }),
            std::cmp::Ordering::Greater => Ok(PairKey { id1: b, id2: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfPair(a)),
        }
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.id1, self.id2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementPair {
    pub id1: String,
    pub id2: String,
    pub label: Option<Label>,
}

impl RequirementPair {
    /// Builds a pair in canonical order. Fails on a self-pair.
    pub fn new(a: impl Into<String>, b: impl Into<String>, label: Option<Label>) -> Result<Self> {
        let PairKey { id1, id2 } = PairKey::new(a, b)?;
        Ok(RequirementPair { id1, id2, label })
    }

    pub fn key(&self) -> PairKey {
        PairKey {
            id1: self.id1.clone(),
            id2: self.id2.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub name: String,
    pub mode: Mode,
    requirements: Vec<Requirement>,
    index: HashMap<String, usize>,
    pub pairs: Vec<RequirementPair>,
}

impl PairDataset {
    /// Builds a dataset from validated requirements. Rejects duplicate ids.
    pub fn new(name: impl Into<String>, mode: Mode, requirements: Vec<Requirement>) -> Result<Self> {
        let mut index = HashMap::with_capacity(requirements.len());
        for (i, r) in requirements.iter().enumerate() {
            r.validate()?;
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(PairDataset {
            name: name.into(),
            mode,
            requirements,
            index,
            pairs: Vec::new(),
        })
    }

    /// Attaches pairs, checking ids, canonical order and the label mode.
    pub fn with_pairs(mut self, pairs: Vec<RequirementPair>) -> Result<Self> {
        for p in &pairs {
            self.check_pair(p)?;
        }
        self.pairs = pairs;
        Ok(self)
    }

    fn check_pair(&self, p: &RequirementPair) -> Result<()> {
        if p.id1 == p.id2 {
            return Err(Error::SelfPair(p.id1.clone()));
        }
        if p.id1 > p.id2 {
            return Err(Error::InvalidArgument(format!(
                "pair ({}, {}) is not in canonical order",
                p.id1, p.id2
            )));
        }
        for id in [&p.id1, &p.id2] {
            if !self.index.contains_key(id) {
                return Err(Error::UnknownId(id.clone()));
            }
        }
        if self.mode == Mode::Cn && p.label == Some(Label::Duplicate) {
            return Err(Error::DuplicateInCn(p.id1.clone(), p.id2.clone()));
        }
        Ok(())
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn requirement(&self, id: &str) -> Option<&Requirement> {
        self.index.get(id).map(|&i| &self.requirements[i])
    }

    /// Pairs sorted by canonical key.
    pub fn sorted_pairs(&self) -> Vec<RequirementPair> {
        let mut pairs = self.pairs.clone();
        pairs.sort_by(|a, b| (&a.id1, &a.id2).cmp(&(&b.id1, &b.id2)));
        pairs
    }

    pub fn label_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for p in &self.pairs {
            if let Some(l) = p.label {
                counts[l as usize] += 1;
            }
        }
        counts
    }

    /// Merges several datasets into one. Requirement ids must be disjoint.
    pub fn concat(name: impl Into<String>, parts: &[&PairDataset]) -> Result<Self> {
        let mode = parts
            .first()
            .map(|d| d.mode)
            .ok_or_else(|| Error::InvalidArgument("no datasets to concatenate".into()))?;
        if let Some(d) = parts.iter().find(|d| d.mode != mode) {
            return Err(Error::ModeMismatch(format!(
                "`{}` is {}, expected {mode}",
                d.name, d.mode
            )));
        }
        let requirements = parts
            .iter()
            .flat_map(|d| d.requirements.iter().cloned())
            .collect();
        let pairs = parts.iter().flat_map(|d| d.pairs.iter().cloned()).collect();
        PairDataset::new(name, mode, requirements)?.with_pairs(pairs)
    }

    /// Restricts the dataset to the given pairs, keeping all requirements.
    pub fn subset(&self, pairs: Vec<RequirementPair>) -> Self {
        PairDataset {
            pairs,
            ..self.clone()
        }
    }
}

/// All `n(n−1)/2` unordered pairs, unlabeled and canonically ordered.
pub fn generate_pairs(dataset: &PairDataset) -> Result<Vec<RequirementPair>> {
    let mut ids: Vec<&str> = dataset.requirements.iter().map(|r| r.id.as_str()).collect();
    if ids.len() < 2 {
        return Err(Error::TooFewRequirements(ids.len()));
    }
    ids.sort_unstable();
    let n = ids.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(RequirementPair {
                id1: ids[i].to_string(),
                id2: ids[j].to_string(),
                label: None,
            });
        }
    }
    Ok(out)
}

/// Drops duplicate-labeled pairs and switches to the two-class scheme.
pub fn derive_cn(dataset: &PairDataset) -> PairDataset {
    let pairs = dataset
        .pairs
        .iter()
        .filter(|p| p.label != Some(Label::Duplicate))
        .cloned()
        .collect();
    PairDataset {
        mode: Mode::Cn,
        pairs,
        ..dataset.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reqs(ids: &[&str]) -> Vec<Requirement> {
        ids.iter()
            .map(|id| Requirement::new(*id, "doc", format!("The system shall do {id}.")))
            .collect()
    }

    #[test]
    fn canonical_ordering() {
        let p = RequirementPair::new("r_b", "r_a", Some(Label::Neutral)).unwrap();
        assert_eq!((p.id1.as_str(), p.id2.as_str()), ("r_a", "r_b"));
        assert!(matches!(
            RequirementPair::new("r_a", "r_a", None),
            Err(Error::SelfPair(_))
        ));
    }

    #[test]
    fn label_parsing_is_case_insensitive() {
        assert_eq!("Conflict".parse::<Label>().unwrap(), Label::Conflict);
        assert_eq!(" NEUTRAL ".parse::<Label>().unwrap(), Label::Neutral);
        assert!("contradiction".parse::<Label>().is_err());
    }

    #[test]
    fn generate_three() {
        let d = PairDataset::new("t", Mode::Cdn, reqs(&["c", "a", "b"])).unwrap();
        let pairs = generate_pairs(&d).unwrap();
        let keys: Vec<_> = pairs.iter().map(|p| (p.id1.as_str(), p.id2.as_str())).collect();
        assert_eq!(keys, vec![("a", "b"), ("a", "c"), ("b", "c")]);
        assert!(pairs.iter().all(|p| p.label.is_none()));
    }

    #[test]
    fn generate_needs_two() {
        let d = PairDataset::new("t", Mode::Cdn, reqs(&["a"])).unwrap();
        assert!(matches!(generate_pairs(&d), Err(Error::TooFewRequirements(1))));
    }

    #[test]
    fn generate_uav_sized() {
        let ids: Vec<String> = (0..116).map(|i| format!("r{i:03}")).collect();
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        let d = PairDataset::new("uav", Mode::Cn, reqs(&ids)).unwrap();
        // 18 conflict + 6652 neutral pairs
        assert_eq!(generate_pairs(&d).unwrap().len(), 18 + 6652);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = PairDataset::new("t", Mode::Cdn, reqs(&["R1", "R1"])).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(id) if id == "R1"));
    }

    fn labeled(counts: [usize; 3]) -> PairDataset {
        let n = 12;
        let ids: Vec<String> = (0..n).map(|i| format!("r{i:02}")).collect();
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        let d = PairDataset::new("t", Mode::Cdn, reqs(&ids)).unwrap();
        let mut all = generate_pairs(&d).unwrap().into_iter();
        let mut pairs = Vec::new();
        for (label, &c) in Label::ALL.iter().zip(&counts) {
            for p in all.by_ref().take(c) {
                pairs.push(RequirementPair {
                    label: Some(*label),
                    ..p
                });
            }
        }
        d.with_pairs(pairs).unwrap()
    }

    #[test]
    fn cn_drops_duplicates() {
        let cdn = labeled([10, 4, 6]);
        let cn = derive_cn(&cdn);
        assert_eq!(cn.mode, Mode::Cn);
        assert_eq!(cn.label_counts(), [10, 0, 6]);
        assert_eq!(cn.requirements(), cdn.requirements());

        let no_dups = labeled([3, 0, 5]);
        assert_eq!(derive_cn(&no_dups).pairs, no_dups.pairs);
    }

    #[test]
    fn cn_totals_from_fold_supports() {
        // 5-fold mean supports of the three-class set (C 1110.6, D 334.6, N 680)
        // against 3-fold mean supports of the two-class set (C 1851, N 1133.33).
        let cdn_c = (1110.6_f64 * 5.0).round() as usize;
        let cdn_n = (680.0_f64 * 5.0).round() as usize;
        let cn_c = (1851.0_f64 * 3.0).round() as usize;
        let cn_n = (1133.33_f64 * 3.0).round() as usize;
        assert_eq!((cdn_c, cdn_n), (5553, 3400));
        assert_eq!((cn_c, cn_n), (cdn_c, cdn_n));

        let cdn = labeled([12, 5, 7]);
        let cn = derive_cn(&cdn);
        assert_eq!(cn.label_counts(), [12, 0, 7]);
    }

    #[test]
    fn cn_rejects_duplicate_labels() {
        let d = PairDataset::new("t", Mode::Cn, reqs(&["a", "b"])).unwrap();
        let pair = RequirementPair::new("a", "b", Some(Label::Duplicate)).unwrap();
        assert!(matches!(d.with_pairs(vec![pair]), Err(Error::DuplicateInCn(..))));
    }

    proptest! {
        #[test]
        fn pair_count_is_n_choose_2(n in 2usize..60) {
            let ids: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            let d = PairDataset::new("t", Mode::Cdn, reqs(&ids)).unwrap();
            prop_assert_eq!(generate_pairs(&d).unwrap().len(), n * (n - 1) / 2);
        }

        #[test]
        fn derive_cn_idempotent(c in 0usize..20, dup in 0usize..20, neu in 0usize..20) {
            let d = labeled([c, dup, neu]);
            let once = derive_cn(&d);
            prop_assert_eq!(derive_cn(&once), once);
        }
    }
}
