//! Seeded synthetic requirement-pair corpora.
//!
//! Requirements are slot-filled from sentence frames such as
//! "The {actor} shall {verb} {object} within {n} {unit}." and pairs are built
//! by rewriting:
//!
//! * duplicate: the verb, object and unit are replaced by synonyms;
//! * conflict: the partner is negated or its quantity changed;
//! * neutral: two independent requirements with different actor, verb and
//!   object;
//! * bait (labeled neutral): same actor, frame and quantity but a different,
//!   negated action on a different object. These look like conflicts to a
//!   surface-similarity classifier while sharing no predicate.
//!
//! Each domain has its own actors and objects; verbs and frames are shared.
//! Annotation records (actors, actions, SRL frames) are emitted by
//! construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Label, Mode, PairDataset, Requirement, RequirementPair};
use crate::error::{Error, Result};
use crate::filters::{AnnotationRecord, SrlFrame};

const FRAMES: &[&str] = &[
    "The {actor} shall {verb} {object} within {n} {unit}.",
    "The {actor} shall {verb} the {object} every {n} {unit}.",
    "Within {n} {unit}, the {actor} shall {verb} {object}.",
    "When requested, the {actor} shall {verb} {object} in less than {n} {unit}.",
    "The {actor} shall {verb} {object} at least once every {n} {unit}.",
    "After startup, the {actor} shall {verb} {object} for {n} {unit}.",
];

/// (verb, synonym)
const VERBS: &[(&str, &str)] = &[
    ("send", "transmit"),
    ("store", "save"),
    ("display", "show"),
    ("validate", "verify"),
    ("delete", "remove"),
    ("update", "modify"),
    ("record", "log"),
    ("encrypt", "encode"),
    ("accept", "receive"),
    ("generate", "produce"),
    ("archive", "back up"),
    ("compress", "shrink"),
];

/// (unit, synonym)
const UNITS: &[(&str, &str)] = &[
    ("seconds", "secs"),
    ("minutes", "mins"),
    ("hours", "hrs"),
    ("milliseconds", "ms"),
];

struct Domain {
    name: &'static str,
    actors: &'static [&'static str],
    /// (object, synonym)
    objects: &'static [(&'static str, &'static str)],
}

const DOMAINS: &[Domain] = &[
    Domain {
        name: "uav",
        actors: &["UAV", "ground station", "flight controller", "camera module", "autopilot"],
        objects: &[
            ("telemetry data", "telemetry readings"),
            ("flight logs", "flight records"),
            ("waypoints", "route points"),
            ("video streams", "video feeds"),
            ("battery status", "battery state"),
            ("pilot commands", "operator commands"),
            ("error reports", "fault reports"),
        ],
    },
    Domain {
        name: "clinic",
        actors: &["system", "scheduler", "pharmacy module", "lab interface", "portal"],
        objects: &[
            ("patient records", "patient files"),
            ("lab orders", "laboratory requests"),
            ("prescriptions", "medication orders"),
            ("discharge summaries", "discharge notes"),
            ("appointment slots", "visit slots"),
            ("allergy lists", "allergy records"),
            ("billing codes", "charge codes"),
        ],
    },
    Domain {
        name: "shop",
        actors: &["web store", "payment service", "warehouse app", "checkout page", "mailer"],
        objects: &[
            ("customer orders", "client orders"),
            ("invoices", "bills"),
            ("shipping labels", "delivery labels"),
            ("product images", "item pictures"),
            ("refund requests", "return requests"),
            ("stock levels", "inventory counts"),
            ("discount codes", "promo codes"),
        ],
    },
];

pub const N_DOMAINS: usize = 3;
pub const MAX_TEMPLATES: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of sentence frames in use, 1..=6.
    pub n_templates: usize,
    pub n_per_class: usize,
    pub seed: u64,
    /// 0 = uav, 1 = clinic, 2 = shop.
    pub domain: usize,
    /// Extra neutral pairs designed to look like conflicts.
    pub bait: usize,
}

impl SynthConfig {
    pub fn new(n_templates: usize, n_per_class: usize, seed: u64) -> Self {
        SynthConfig {
            n_templates,
            n_per_class,
            seed,
            domain: 0,
            bait: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub dataset: PairDataset,
    pub annotations: Vec<AnnotationRecord>,
}

#[derive(Clone)]
struct Slots {
    frame: usize,
    actor: usize,
    verb: usize,
    object: usize,
    unit: usize,
    n: u32,
    negated: bool,
    synonyms: bool,
}

impl Slots {
    fn verb<'a>(&self) -> &'a str {
        let (v, s) = VERBS[self.verb];
        if self.synonyms { s } else { v }
    }

    fn render(&self, d: &Domain) -> String {
        let pick = |(a, b): (&'static str, &'static str)| if self.synonyms { b } else { a };
        let verb = if self.negated {
            format!("not {}", self.verb())
        } else {
            self.verb().to_string()
        };
        let text = FRAMES[self.frame]
            .replace("{actor}", d.actors[self.actor])
            .replace("{verb}", &verb)
            .replace("{object}", pick(d.objects[self.object]))
            .replace("{n}", &self.n.to_string())
            .replace("{unit}", pick(UNITS[self.unit]));
        let mut chars = text.chars();
        match chars.next() {
            Some(c) => c.to_uppercase().chain(chars).collect(),
            None => text,
        }
    }

    fn annotation(&self, id: &str, d: &Domain) -> AnnotationRecord {
        let object = if self.synonyms {
            d.objects[self.object].1
        } else {
            d.objects[self.object].0
        };
        let actor = format!("the {}", d.actors[self.actor]);
        AnnotationRecord {
            id: id.to_string(),
            actors: Some([d.actors[self.actor].to_lowercase()].into()),
            actions: Some([self.verb().to_string()].into()),
            pos: None,
            srl: Some(vec![SrlFrame::new(self.verb(), Some(&actor), Some(object))]),
        }
        .normalized()
        .0
    }
}

struct Builder<'a> {
    cfg: &'a SynthConfig,
    domain: &'a Domain,
    rng: ChaCha8Rng,
    requirements: Vec<Requirement>,
    annotations: Vec<AnnotationRecord>,
    pairs: Vec<RequirementPair>,
}

impl Builder<'_> {
    fn random_slots(&mut self) -> Slots {
        Slots {
            frame: self.rng.gen_range(0..self.cfg.n_templates),
            actor: self.rng.gen_range(0..self.domain.actors.len()),
            verb: self.rng.gen_range(0..VERBS.len()),
            object: self.rng.gen_range(0..self.domain.objects.len()),
            unit: self.rng.gen_range(0..UNITS.len()),
            n: self.rng.gen_range(2..60),
            negated: false,
            synonyms: false,
        }
    }

    fn other(&mut self, current: usize, len: usize) -> usize {
        (current + self.rng.gen_range(1..len)) % len
    }

    fn push(&mut self, slots: &Slots) -> String {
        let id = format!("{}-{:04}", self.domain.name, self.requirements.len());
        let text = slots.render(self.domain);
        self.annotations.push(slots.annotation(&id, self.domain));
        self.requirements.push(Requirement::new(id.clone(), self.domain.name, text));
        id
    }

    fn pair(&mut self, a: &Slots, b: &Slots, label: Label) -> Result<()> {
        let ia = self.push(a);
        let ib = self.push(b);
        self.pairs.push(RequirementPair::new(ia, ib, Some(label))?);
        Ok(())
    }

    fn conflict(&mut self) -> Result<()> {
        let base = self.random_slots();
        let mut alt = base.clone();
        if self.rng.gen_bool(0.5) {
            alt.negated = true;
        } else {
            alt.n = base.n * self.rng.gen_range(3..10);
        }
        let (a, b) = if self.rng.gen_bool(0.5) { (base, alt) } else { (alt, base) };
        self.pair(&a, &b, Label::Conflict)
    }

    fn duplicate(&mut self) -> Result<()> {
        let base = self.random_slots();
        let alt = Slots {
            synonyms: true,
            ..base.clone()
        };
        self.pair(&base, &alt, Label::Duplicate)
    }

    fn neutral(&mut self) -> Result<()> {
        let a = self.random_slots();
        let mut b = self.random_slots();
        b.actor = self.other(a.actor, self.domain.actors.len());
        b.verb = self.other(a.verb, VERBS.len());
        b.object = self.other(a.object, self.domain.objects.len());
        self.pair(&a, &b, Label::Neutral)
    }

    fn bait(&mut self) -> Result<()> {
        let a = self.random_slots();
        let mut b = a.clone();
        b.verb = self.other(a.verb, VERBS.len());
        b.object = self.other(a.object, self.domain.objects.len());
        b.negated = true;
        self.pair(&a, &b, Label::Neutral)
    }
}

/// Generates `n_per_class` pairs of each class (plus `bait` neutral bait
/// pairs). Every pair gets two fresh requirements. Output is a function of
/// the config alone.
pub fn synth_corpus(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.n_per_class == 0 {
        return Err(Error::InvalidArgument("n_per_class must be at least 1".into()));
    }
    if !(1..=MAX_TEMPLATES).contains(&cfg.n_templates) {
        return Err(Error::InvalidArgument(format!(
            "n_templates must lie in 1..={MAX_TEMPLATES}, got {}",
            cfg.n_templates
        )));
    }
    let domain = DOMAINS.get(cfg.domain).ok_or_else(|| {
        Error::InvalidArgument(format!("domain must lie in 0..{N_DOMAINS}, got {}", cfg.domain))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(cfg.domain as u64);
    let mut b = Builder {
        cfg,
        domain,
        rng,
        requirements: Vec::new(),
        annotations: Vec::new(),
        pairs: Vec::new(),
    };
    let mut plan: Vec<u8> = Vec::new();
    for kind in 0..3u8 {
        plan.extend(std::iter::repeat_n(kind, cfg.n_per_class));
    }
    plan.extend(std::iter::repeat_n(3u8, cfg.bait));
    plan.shuffle(&mut b.rng);
    for kind in plan {
        match kind {
            0 => b.conflict()?,
            1 => b.duplicate()?,
            2 => b.neutral()?,
            _ => b.bait()?,
        }
    }
    let name = format!("synth-{}", domain.name);
    let dataset = PairDataset::new(name, Mode::Cdn, b.requirements)?.with_pairs(b.pairs)?;
    Ok(SynthCorpus {
        dataset,
        annotations: b.annotations,
    })
}

pub fn domain_name(domain: usize) -> Option<&'static str> {
    DOMAINS.get(domain).map(|d| d.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{builtin_embed, cosine};

    #[test]
    fn five_per_class() {
        let c = synth_corpus(&SynthConfig::new(4, 5, 1)).unwrap();
        assert_eq!(c.dataset.pairs.len(), 15);
        assert_eq!(c.dataset.label_counts(), [5, 5, 5]);
        assert_eq!(c.annotations.len(), c.dataset.requirements().len());
    }

    #[test]
    fn deterministic() {
        let cfg = SynthConfig {
            bait: 3,
            ..SynthConfig::new(6, 7, 42)
        };
        let a = synth_corpus(&cfg).unwrap();
        let b = synth_corpus(&cfg).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.annotations, b.annotations);
        let c = synth_corpus(&SynthConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn conflicts_share_actor() {
        let c = synth_corpus(&SynthConfig::new(6, 20, 3)).unwrap();
        let actors = |id: &str| {
            c.annotations.iter().find(|a| a.id == id).unwrap().actors.clone().unwrap()
        };
        for p in c.dataset.pairs.iter().filter(|p| p.label == Some(Label::Conflict)) {
            assert_eq!(actors(&p.id1), actors(&p.id2));
            let t1 = &c.dataset.requirement(&p.id1).unwrap().text;
            let t2 = &c.dataset.requirement(&p.id2).unwrap().text;
            let actor = actors(&p.id1).into_iter().next().unwrap();
            assert!(t1.to_lowercase().contains(&actor) && t2.to_lowercase().contains(&actor));
        }
    }

    #[test]
    fn domains_disjoint_ids() {
        let a = synth_corpus(&SynthConfig::new(3, 4, 0)).unwrap();
        let b = synth_corpus(&SynthConfig {
            domain: 1,
            ..SynthConfig::new(3, 4, 0)
        })
        .unwrap();
        for r in a.dataset.requirements() {
            assert!(b.dataset.requirement(&r.id).is_none());
        }
    }

    #[test]
    fn bait_pairs_are_neutral() {
        let c = synth_corpus(&SynthConfig {
            bait: 10,
            ..SynthConfig::new(6, 2, 5)
        })
        .unwrap();
        assert_eq!(c.dataset.label_counts(), [2, 2, 12]);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(synth_corpus(&SynthConfig::new(3, 0, 0)).is_err());
        assert!(synth_corpus(&SynthConfig::new(0, 1, 0)).is_err());
        assert!(synth_corpus(&SynthConfig::new(7, 1, 0)).is_err());
    }

    #[test]
    fn duplicates_closer_than_unrelated() {
        // mean cosine of duplicate rewrites vs neutral pairs under the builtin encoder
        let c = synth_corpus(&SynthConfig::new(6, 40, 11)).unwrap();
        let store = builtin_embed(c.dataset.requirements(), 256, 0).unwrap();
        let sim = |p: &RequirementPair| cosine(store.get(&p.id1).unwrap(), store.get(&p.id2).unwrap());
        let by = |l: Label| -> Vec<f64> {
            c.dataset.pairs.iter().filter(|p| p.label == Some(l)).map(sim).collect()
        };
        let dups = by(Label::Duplicate);
        let neutral = by(Label::Neutral);
        let min_dup = dups.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_neutral = neutral.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(min_dup > max_neutral, "min dup {min_dup} vs max neutral {max_neutral}");
    }
}
