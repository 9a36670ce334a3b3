//! Rule-based validation of conflict predictions.
//!
//! Each filter looks at a requirement pair and returns a binary verdict.
//! The verdict only matters for pairs the classifier predicted as conflict:
//! [`apply_filter`] demotes those the filter calls neutral and leaves every
//! other prediction alone.
//!
//! * [`actor_action_filter`]: conflict iff the pair shares at least one actor
//!   and at least one action.
//! * [`pos_filter`]: conflict iff the pair shares at least one noun
//!   (`NN*`) and at least one content verb (`VB*`, copulas and auxiliaries
//!   excluded).
//! * [`srl_filter`]: neutral if no predicate is shared; otherwise conflict iff
//!   the `ARG0`/`ARG1` content words of a shared predicate overlap.
//!
//! Strings are compared after [`text::normalize`] and, unless
//! [`FilterOptions::strict`] is set, [`text::light_stem`].

mod annotations;
pub mod pos;
pub mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Label, PairDataset, PairKey, RequirementPair};
use crate::error::{Error, Result};

pub use annotations::{
    load_annotations, write_annotations, AnnotationRecord, Annotations, LoadedAnnotations,
    SrlFrame, SRL_ROLES,
};
pub use pos::builtin_pos_tag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ActorAction,
    Pos,
    Srl,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ActorAction => "actor-action",
            Method::Pos => "pos",
            Method::Srl => "srl",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "actor-action" | "actor_action" | "aa" => Ok(Method::ActorAction),
            "pos" => Ok(Method::Pos),
            "srl" => Ok(Method::Srl),
            other => Err(Error::InvalidArgument(format!("unknown filter method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Conflict,
    Neutral,
}

impl From<Verdict> for Label {
    fn from(v: Verdict) -> Label {
        match v {
            Verdict::Conflict => Label::Conflict,
            Verdict::Neutral => Label::Neutral,
        }
    }
}

/// Which SRL frames may supply the overlapping arguments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SrlScope {
    /// Only frames whose predicate is shared by both requirements.
    #[default]
    SharedVerb,
    /// Any frame, once at least one predicate is shared.
    AnyFrame,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterOptions {
    /// Exact match after normalization, no stemming.
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub srl_scope: SrlScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub pair: PairKey,
    pub verdict: Verdict,
    pub method: Method,
    /// Matched strings; never empty for a conflict verdict.
    pub evidence: Vec<String>,
}

fn keys<'a>(items: impl IntoIterator<Item = &'a String>, strict: bool) -> BTreeSet<String> {
    items
        .into_iter()
        .map(|s| text::match_key(s, strict))
        .filter(|s| !s.is_empty())
        .collect()
}

fn record<'a>(ann: &'a Annotations, id: &str, what: &'static str) -> Result<&'a AnnotationRecord> {
    ann.get(id).ok_or_else(|| Error::MissingAnnotation {
        id: id.to_string(),
        what,
    })
}

fn decide(pair: &RequirementPair, method: Method, evidence: Option<Vec<String>>) -> FilterDecision {
    let (verdict, evidence) = match evidence {
        Some(e) if !e.is_empty() => (Verdict::Conflict, e),
        _ => (Verdict::Neutral, Vec::new()),
    };
    FilterDecision {
        pair: pair.key(),
        verdict,
        method,
        evidence,
    }
}

fn both_nonempty(a: &BTreeSet<String>, b: &BTreeSet<String>, tags: (&str, &str)) -> Option<Vec<String>> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut ev: Vec<String> = a.iter().map(|s| format!("{}:{s}", tags.0)).collect();
    ev.extend(b.iter().map(|s| format!("{}:{s}", tags.1)));
    Some(ev)
}

/// Conflict iff the pair shares an actor and an action.
pub fn actor_action_filter(
    pairs: &[RequirementPair],
    annotations: &Annotations,
    opts: FilterOptions,
) -> Result<Vec<FilterDecision>> {
    let entities = |id: &str| -> Result<(BTreeSet<String>, BTreeSet<String>)> {
        let r = record(annotations, id, "actor/action")?;
        let missing = |what| Error::MissingAnnotation {
            id: id.to_string(),
            what,
        };
        let actors = r.actors.as_ref().ok_or_else(|| missing("actor"))?;
        let actions = r.actions.as_ref().ok_or_else(|| missing("action"))?;
        Ok((keys(actors, opts.strict), keys(actions, opts.strict)))
    };
    pairs
        .par_iter()
        .map(|p| {
            let (actors_i, actions_i) = entities(&p.id1)?;
            let (actors_j, actions_j) = entities(&p.id2)?;
            let shared_actors = actors_i.intersection(&actors_j).cloned().collect();
            let shared_actions = actions_i.intersection(&actions_j).cloned().collect();
            let ev = both_nonempty(&shared_actors, &shared_actions, ("actor", "action"));
            Ok(decide(p, Method::ActorAction, ev))
        })
        .collect()
}

/// Noun and content-verb keys of a tagged sentence.
fn nouns_and_verbs(tags: &[(String, String)], strict: bool) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut nouns = BTreeSet::new();
    let mut verbs = BTreeSet::new();
    for (tok, tag) in tags {
        let word = text::normalize(tok);
        if word.is_empty() || !word.chars().any(char::is_alphabetic) {
            continue;
        }
        if pos::is_noun_tag(tag) {
            nouns.insert(text::match_key(&word, strict));
        } else if pos::is_verb_tag(tag) && !pos::is_auxiliary(&word) {
            verbs.insert(text::match_key(&word, strict));
        }
    }
    (nouns, verbs)
}

/// Tags for `id`: from its annotation if present, otherwise from the
/// built-in tagger over the requirement text.
pub fn pos_tags(id: &str, annotations: &Annotations, dataset: &PairDataset) -> Result<Vec<(String, String)>> {
    if let Some(pos) = annotations.get(id).and_then(|r| r.pos.clone()) {
        return Ok(pos);
    }
    let req = dataset.requirement(id).ok_or_else(|| Error::MissingAnnotation {
        id: id.to_string(),
        what: "POS",
    })?;
    builtin_pos_tag(&req.text)
}

/// Conflict iff the pair shares a noun and a content verb.
pub fn pos_filter(
    pairs: &[RequirementPair],
    annotations: &Annotations,
    dataset: &PairDataset,
    opts: FilterOptions,
) -> Result<Vec<FilterDecision>> {
    let mut ids: BTreeSet<&str> = BTreeSet::new();
    for p in pairs {
        ids.insert(&p.id1);
        ids.insert(&p.id2);
    }
    let tagged: BTreeMap<&str, (BTreeSet<String>, BTreeSet<String>)> = ids
        .into_par_iter()
        .map(|id| Ok((id, nouns_and_verbs(&pos_tags(id, annotations, dataset)?, opts.strict))))
        .collect::<Result<_>>()?;
    Ok(pairs
        .par_iter()
        .map(|p| {
            let (ni, vi) = &tagged[p.id1.as_str()];
            let (nj, vj) = &tagged[p.id2.as_str()];
            let shared_nouns = ni.intersection(nj).cloned().collect();
            let shared_verbs = vi.intersection(vj).cloned().collect();
            decide(p, Method::Pos, both_nonempty(&shared_nouns, &shared_verbs, ("noun", "verb")))
        })
        .collect())
}

/// Predicate key → content words of its ARG0 ∪ ARG1 spans.
fn srl_index(frames: &[SrlFrame], strict: bool) -> BTreeMap<String, BTreeSet<String>> {
    let mut index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in frames {
        let verb = text::match_key(&f.verb, strict);
        if verb.is_empty() {
            continue;
        }
        let entry = index.entry(verb).or_default();
        for role in SRL_ROLES {
            if let Some(span) = f.args.get(role) {
                entry.extend(
                    text::words(span)
                        .into_iter()
                        .filter(|w| !text::is_stopword(w))
                        .map(|w| if strict { w } else { text::light_stem(&w) }),
                );
            }
        }
    }
    index
}

/// Neutral when no predicate is shared; otherwise conflict iff the argument
/// content words overlap (within a shared predicate's frames by default).
pub fn srl_filter(
    pairs: &[RequirementPair],
    annotations: &Annotations,
    opts: FilterOptions,
) -> Result<Vec<FilterDecision>> {
    let frames = |id: &str| -> Result<BTreeMap<String, BTreeSet<String>>> {
        let r = record(annotations, id, "SRL")?;
        let srl = r.srl.as_ref().ok_or_else(|| Error::MissingAnnotation {
            id: id.to_string(),
            what: "SRL",
        })?;
        Ok(srl_index(srl, opts.strict))
    };
    pairs
        .par_iter()
        .map(|p| {
            let fi = frames(&p.id1)?;
            let fj = frames(&p.id2)?;
            let shared: Vec<&String> = fi.keys().filter(|v| fj.contains_key(*v)).collect();
            if shared.is_empty() {
                return Ok(decide(p, Method::Srl, None));
            }
            let overlap: BTreeSet<String> = match opts.srl_scope {
                SrlScope::SharedVerb => shared
                    .iter()
                    .flat_map(|v| fi[*v].intersection(&fj[*v]).cloned())
                    .collect(),
                SrlScope::AnyFrame => {
                    let all_i: BTreeSet<_> = fi.values().flatten().cloned().collect();
                    let all_j: BTreeSet<_> = fj.values().flatten().cloned().collect();
                    all_i.intersection(&all_j).cloned().collect()
                }
            };
            let ev = (!overlap.is_empty()).then(|| {
                let mut ev: Vec<String> = shared.iter().map(|v| format!("verb:{v}")).collect();
                ev.extend(overlap.iter().map(|a| format!("arg:{a}")));
                ev
            });
            Ok(decide(p, Method::Srl, ev))
        })
        .collect()
}

pub fn run_filter(
    method: Method,
    pairs: &[RequirementPair],
    annotations: &Annotations,
    dataset: &PairDataset,
    opts: FilterOptions,
) -> Result<Vec<FilterDecision>> {
    match method {
        Method::ActorAction => actor_action_filter(pairs, annotations, opts),
        Method::Pos => pos_filter(pairs, annotations, dataset, opts),
        Method::Srl => srl_filter(pairs, annotations, opts),
    }
}

/// Replaces each conflict prediction by the filter verdict. Other
/// predictions pass through; nothing is ever promoted to conflict.
pub fn apply_filter(
    predictions: &BTreeMap<PairKey, Label>,
    decisions: &[FilterDecision],
) -> Result<BTreeMap<PairKey, Label>> {
    let verdicts: BTreeMap<&PairKey, Verdict> = decisions.iter().map(|d| (&d.pair, d.verdict)).collect();
    predictions
        .iter()
        .map(|(key, &label)| {
            if label != Label::Conflict {
                return Ok((key.clone(), label));
            }
            let v = verdicts
                .get(key)
                .ok_or_else(|| Error::UncoveredPositive(key.id1.clone(), key.id2.clone()))?;
            Ok((key.clone(), Label::from(*v)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Mode, Requirement};
    use proptest::prelude::*;

    fn ann(id: &str, actors: &[&str], actions: &[&str]) -> AnnotationRecord {
        AnnotationRecord {
            id: id.into(),
            actors: Some(actors.iter().map(|s| s.to_string()).collect()),
            actions: Some(actions.iter().map(|s| s.to_string()).collect()),
            ..Default::default()
        }
    }

    fn index(records: Vec<AnnotationRecord>) -> Annotations {
        records.into_iter().map(|r| (r.id.clone(), r.normalized().0)).collect()
    }

    fn pair(a: &str, b: &str) -> RequirementPair {
        RequirementPair::new(a, b, None).unwrap()
    }

    #[test]
    fn actor_action_shared() {
        let a = index(vec![ann("a", &["UAV"], &["accept"]), ann("b", &["uav"], &["accepts"])]);
        let d = actor_action_filter(&[pair("a", "b")], &a, FilterOptions::default()).unwrap();
        assert_eq!(d[0].verdict, Verdict::Conflict);
        assert!(!d[0].evidence.is_empty());

        let strict = FilterOptions {
            strict: true,
            ..Default::default()
        };
        let d = actor_action_filter(&[pair("a", "b")], &a, strict).unwrap();
        assert_eq!(d[0].verdict, Verdict::Neutral);
    }

    #[test]
    fn actor_action_empty_actor_is_neutral() {
        let a = index(vec![ann("a", &[], &["fly"]), ann("b", &["uav"], &["fly"])]);
        let d = actor_action_filter(&[pair("a", "b")], &a, FilterOptions::default()).unwrap();
        assert_eq!(d[0].verdict, Verdict::Neutral);
        assert!(d[0].evidence.is_empty());
    }

    #[test]
    fn actor_action_missing_annotation() {
        let a = index(vec![ann("a", &["uav"], &["fly"])]);
        let err = actor_action_filter(&[pair("a", "b")], &a, FilterOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingAnnotation { id, .. } if id == "b"));
    }

    fn dataset(texts: &[(&str, &str)]) -> PairDataset {
        let reqs = texts.iter().map(|(id, t)| Requirement::new(*id, "d", *t)).collect();
        PairDataset::new("t", Mode::Cdn, reqs).unwrap()
    }

    #[test]
    fn pos_noun_without_verb() {
        let d = dataset(&[
            ("a", "The UAV shall record flight logs."),
            ("b", "The UAV shall transmit video."),
        ]);
        let out = pos_filter(&[pair("a", "b")], &Annotations::new(), &d, FilterOptions::default()).unwrap();
        assert_eq!(out[0].verdict, Verdict::Neutral);
    }

    #[test]
    fn pos_identical_requirements() {
        let t = "The UAV shall send the Pilot real-time data about errors.";
        let d = dataset(&[("a", t), ("b", t)]);
        let out = pos_filter(&[pair("a", "b")], &Annotations::new(), &d, FilterOptions::default()).unwrap();
        assert_eq!(out[0].verdict, Verdict::Conflict);
    }

    #[test]
    fn pos_prefers_annotation_tags() {
        let d = dataset(&[("a", "x y z"), ("b", "x y z")]);
        let mut a = Annotations::new();
        for id in ["a", "b"] {
            a.insert(
                id.into(),
                AnnotationRecord {
                    id: id.into(),
                    pos: Some(vec![("uav".into(), "NNP".into()), ("flies".into(), "VBZ".into())]),
                    ..Default::default()
                },
            );
        }
        let out = pos_filter(&[pair("a", "b")], &a, &d, FilterOptions::default()).unwrap();
        assert_eq!(out[0].verdict, Verdict::Conflict);
        assert!(out[0].evidence.contains(&"verb:fly".to_string()));
    }

    fn srl(id: &str, frames: Vec<SrlFrame>) -> AnnotationRecord {
        AnnotationRecord {
            id: id.into(),
            srl: Some(frames),
            ..Default::default()
        }
    }

    #[test]
    fn srl_shared_verb_disjoint_args() {
        let a = index(vec![
            srl("a", vec![SrlFrame::new("send", Some("The UAV"), Some("telemetry"))]),
            srl("b", vec![SrlFrame::new("send", Some("The operator"), Some("an email"))]),
        ]);
        let d = srl_filter(&[pair("a", "b")], &a, FilterOptions::default()).unwrap();
        assert_eq!(d[0].verdict, Verdict::Neutral);
    }

    #[test]
    fn srl_self_pair_overlaps() {
        let f = vec![SrlFrame::new("send", Some("The UAV"), Some("telemetry"))];
        let a = index(vec![srl("a", f.clone()), srl("b", f)]);
        let d = srl_filter(&[pair("a", "b")], &a, FilterOptions::default()).unwrap();
        assert_eq!(d[0].verdict, Verdict::Conflict);
        assert!(d[0].evidence.contains(&"verb:send".to_string()));
    }

    #[test]
    fn srl_scope_any_frame() {
        // shared predicate "log" has disjoint args; overlap sits in another frame
        let a = index(vec![
            srl(
                "a",
                vec![
                    SrlFrame::new("log", None, Some("errors")),
                    SrlFrame::new("send", Some("the uav"), Some("telemetry")),
                ],
            ),
            srl(
                "b",
                vec![
                    SrlFrame::new("log", None, Some("warnings")),
                    SrlFrame::new("display", Some("the uav"), None),
                ],
            ),
        ]);
        let p = [pair("a", "b")];
        let shared = srl_filter(&p, &a, FilterOptions::default()).unwrap();
        assert_eq!(shared[0].verdict, Verdict::Neutral);
        let any = FilterOptions {
            srl_scope: SrlScope::AnyFrame,
            ..Default::default()
        };
        assert_eq!(srl_filter(&p, &a, any).unwrap()[0].verdict, Verdict::Conflict);
    }

    #[test]
    fn srl_requires_frames() {
        let a = index(vec![ann("a", &["uav"], &["fly"]), ann("b", &["uav"], &["fly"])]);
        let err = srl_filter(&[pair("a", "b")], &a, FilterOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingAnnotation { what: "SRL", .. }));
    }

    #[test]
    fn apply_demotes_only() {
        let k1 = PairKey::new("a", "b").unwrap();
        let k2 = PairKey::new("a", "c").unwrap();
        let k3 = PairKey::new("b", "c").unwrap();
        let preds: BTreeMap<_, _> = [
            (k1.clone(), Label::Neutral),
            (k2.clone(), Label::Conflict),
            (k3.clone(), Label::Conflict),
        ]
        .into();
        let dec = |k: &PairKey, v| FilterDecision {
            pair: k.clone(),
            verdict: v,
            method: Method::Pos,
            evidence: if v == Verdict::Conflict { vec!["x".into()] } else { vec![] },
        };
        let decisions = vec![
            dec(&k1, Verdict::Conflict),
            dec(&k2, Verdict::Neutral),
            dec(&k3, Verdict::Conflict),
        ];
        let out = apply_filter(&preds, &decisions).unwrap();
        assert_eq!(out[&k1], Label::Neutral);
        assert_eq!(out[&k2], Label::Neutral);
        assert_eq!(out[&k3], Label::Conflict);

        let err = apply_filter(&preds, &decisions[..1]).unwrap_err();
        assert!(matches!(err, Error::UncoveredPositive(..)));
    }

    const VOCAB: &[&str] = &["uav", "pilot", "send", "fly", "data", "logs", "record", "camera"];

    fn arb_record(id: &'static str) -> impl Strategy<Value = AnnotationRecord> {
        let set = || proptest::sample::subsequence(VOCAB, 0..4);
        (set(), set(), proptest::collection::vec((0usize..8, set(), set()), 0..3)).prop_map(
            move |(actors, actions, frames)| {
                let srl = frames
                    .into_iter()
                    .map(|(v, a0, a1)| SrlFrame::new(VOCAB[v], Some(&a0.join(" ")), Some(&a1.join(" "))))
                    .collect();
                AnnotationRecord {
                    id: id.into(),
                    actors: Some(actors.iter().map(|s| s.to_string()).collect()),
                    actions: Some(actions.iter().map(|s| s.to_string()).collect()),
                    pos: None,
                    srl: Some(srl),
                }
            },
        )
    }

    proptest! {
        #[test]
        fn filters_symmetric(a in arb_record("a"), b in arb_record("b")) {
            let ann = index(vec![a.clone(), b.clone()]);
            let swapped: Annotations = index(vec![
                AnnotationRecord { id: "a".into(), ..b },
                AnnotationRecord { id: "b".into(), ..a },
            ]);
            let p = [pair("a", "b")];
            let opts = FilterOptions::default();
            prop_assert_eq!(
                actor_action_filter(&p, &ann, opts).unwrap()[0].verdict,
                actor_action_filter(&p, &swapped, opts).unwrap()[0].verdict
            );
            prop_assert_eq!(
                srl_filter(&p, &ann, opts).unwrap()[0].verdict,
                srl_filter(&p, &swapped, opts).unwrap()[0].verdict
            );
        }

        #[test]
        fn srl_disjoint_verbs_neutral(a in arb_record("a"), b in arb_record("b")) {
            let ann = index(vec![a, b]);
            let verbs = |id: &str| -> BTreeSet<String> {
                ann[id].srl.as_ref().unwrap().iter().map(|f| text::match_key(&f.verb, false)).collect()
            };
            if verbs("a").is_disjoint(&verbs("b")) {
                let d = srl_filter(&[pair("a", "b")], &ann, FilterOptions::default()).unwrap();
                prop_assert_eq!(d[0].verdict, Verdict::Neutral);
            }
        }
    }
}
