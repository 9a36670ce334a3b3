//! Per-requirement annotations: actors, actions, POS tags and SRL frames.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pos::is_known_tag;
use super::text::normalize;
use crate::error::{Error, Result};

/// Only the agent-like and patient-like roles are kept.
pub const SRL_ROLES: [&str; 2] = ["ARG0", "ARG1"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrlFrame {
    pub verb: String,
    #[serde(default)]
    pub args: BTreeMap<String, String>,
}

impl SrlFrame {
    pub fn new(verb: impl Into<String>, arg0: Option<&str>, arg1: Option<&str>) -> Self {
        let mut args = BTreeMap::new();
        if let Some(a) = arg0 {
            args.insert("ARG0".to_string(), a.to_string());
        }
        if let Some(a) = arg1 {
            args.insert("ARG1".to_string(), a.to_string());
        }
        SrlFrame {
            verb: verb.into(),
            args,
        }
    }
}

/// Annotation for one requirement. `None` marks a section that was not
/// supplied, as opposed to one that was supplied empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actors: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srl: Option<Vec<SrlFrame>>,
}

pub type Annotations = BTreeMap<String, AnnotationRecord>;

#[derive(Debug, Clone, Default)]
pub struct LoadedAnnotations {
    pub records: Annotations,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default)]
    actors: Option<Vec<String>>,
    #[serde(default)]
    actions: Option<Vec<String>>,
    #[serde(default)]
    pos: Option<Vec<(String, String)>>,
    #[serde(default)]
    srl: Option<Vec<SrlFrame>>,
}

fn normalize_set(items: Vec<String>) -> BTreeSet<String> {
    items
        .iter()
        .map(|s| normalize(s))
        .filter(|s| !s.is_empty())
        .collect()
}

impl AnnotationRecord {
    /// Normalizes strings in place. Returns warnings for unknown POS tags,
    /// dropped SRL roles and empty predicates.
    pub fn normalized(mut self) -> (Self, Vec<String>) {
        let mut warnings = Vec::new();
        if let Some(actors) = self.actors.take() {
            self.actors = Some(normalize_set(actors.into_iter().collect()));
        }
        if let Some(actions) = self.actions.take() {
            self.actions = Some(normalize_set(actions.into_iter().collect()));
        }
        if let Some(pos) = self.pos.take() {
            let mut out = Vec::with_capacity(pos.len());
            for (tok, tag) in pos {
                if !is_known_tag(&tag) {
                    warnings.push(format!("{}: unknown POS tag `{tag}`", self.id));
                }
                out.push((tok.to_lowercase(), tag));
            }
            self.pos = Some(out);
        }
        if let Some(frames) = self.srl.take() {
            let mut out = Vec::with_capacity(frames.len());
            for f in frames {
                let verb = normalize(&f.verb);
                if verb.is_empty() {
                    warnings.push(format!("{}: SRL frame with empty verb dropped", self.id));
                    continue;
                }
                let mut args = BTreeMap::new();
                for (role, span) in f.args {
                    if SRL_ROLES.contains(&role.as_str()) {
                        args.insert(role, normalize(&span));
                    } else {
                        warnings.push(format!("{}: SRL role `{role}` ignored", self.id));
                    }
                }
                out.push(SrlFrame { verb, args });
            }
            self.srl = Some(out);
        }
        (self, warnings)
    }
}

/// Reads annotation JSONL. Every key except `id` is optional.
pub fn load_annotations(path: &Path) -> Result<LoadedAnnotations> {
    let file = File::open(path)?;
    let mut loaded = LoadedAnnotations::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let record = AnnotationRecord {
            id: raw.id,
            actors: raw.actors.map(|v| v.into_iter().collect()),
            actions: raw.actions.map(|v| v.into_iter().collect()),
            pos: raw.pos,
            srl: raw.srl,
        };
        let (record, warnings) = record.normalized();
        for w in &warnings {
            log::warn!("{}:{}: {w}", path.display(), i + 1);
        }
        loaded.warnings.extend(warnings);
        if loaded.records.contains_key(&record.id) {
            return Err(Error::DuplicateId(record.id));
        }
        loaded.records.insert(record.id.clone(), record);
    }
    Ok(loaded)
}

pub fn write_annotations<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a AnnotationRecord>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
