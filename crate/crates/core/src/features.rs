//! Requirement embeddings and the pair feature `u ⊕ v ⊕ (u − v)`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{PairKey, Requirement, RequirementPair};
use crate::error::{Error, Result};

pub const MIN_BUILTIN_DIM: usize = 16;
pub const NGRAM_SIZES: [usize; 3] = [3, 4, 5];

/// Fixed-dimension vectors keyed by requirement id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        EmbeddingStore {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vec: Vec<f64>) -> Result<()> {
        let id = id.into();
        if vec.len() != self.dim {
            return Err(Error::DimensionMismatch {
                id,
                expected: self.dim,
                got: vec.len(),
            });
        }
        if vec.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(id));
        }
        if self.vectors.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.vectors.insert(id, vec);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Union of two stores with the same dimension. Ids must be disjoint.
    pub fn merge(mut self, other: EmbeddingStore) -> Result<Self> {
        if self.is_empty() {
            return Ok(other);
        }
        for (id, v) in other.vectors {
            self.insert(id, v)?;
        }
        Ok(self)
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingRecord {
    id: String,
    vec: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct EmbeddingRecordOut<'a> {
    id: &'a str,
    vec: Vec<f32>,
}

/// Loads embedding JSONL. The dimension is taken from the first record.
/// Values are stored as 32-bit floats on disk and widened on load; bare
/// `NaN`/`Infinity` tokens and values outside the `f32` range are rejected.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingStore> {
    let file = File::open(path)?;
    let mut store: Option<EmbeddingStore> = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |e: serde_json::Error| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        };
        let rec: EmbeddingRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                // JSON has no non-finite literals, but some writers emit them anyway
                let patched = line
                    .replace("-Infinity", "null")
                    .replace("Infinity", "null")
                    .replace("NaN", "null");
                serde_json::from_str(&patched).map_err(|_| parse_err(e))?
            }
        };
        let mut vec = Vec::with_capacity(rec.vec.len());
        for v in &rec.vec {
            let v = v.map(|v| v as f32).filter(|v| v.is_finite());
            match v {
                Some(v) => vec.push(f64::from(v)),
                None => return Err(Error::NonFinite(rec.id)),
            }
        }
        let store = store.get_or_insert_with(|| EmbeddingStore::new(vec.len()));
        if vec.is_empty() {
            return Err(Error::InvalidArgument(format!("empty vector for `{}`", rec.id)));
        }
        store.insert(rec.id, vec)?;
    }
    store.ok_or_else(|| Error::InvalidArgument(format!("{} holds no embeddings", path.display())))
}

/// Writes embedding JSONL, one record per line in id order.
pub fn write_embeddings(path: &Path, store: &EmbeddingStore) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (id, v) in store.iter() {
        let rec = EmbeddingRecordOut {
            id,
            vec: v.iter().map(|&x| x as f32).collect(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over the little-endian seed bytes followed by `bytes`.
pub fn seeded_fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn embed_text(text: &str, dim: usize, seed: u64) -> Vec<f64> {
    let folded: String = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    let chars: Vec<char> = format!(" {folded} ").chars().collect();
    let mut v = vec![0.0f64; dim];
    let mut buf = String::new();
    for n in NGRAM_SIZES {
        for window in chars.windows(n) {
            buf.clear();
            buf.extend(window);
            let h = seeded_fnv1a(seed, buf.as_bytes());
            let bucket = (h % dim as u64) as usize;
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            v[bucket] += sign;
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        // round through f32 so a store survives a write/load cycle unchanged
        v.iter_mut().for_each(|x| *x = f64::from((*x / norm) as f32));
    }
    v
}

/// Hashed character n-gram encoder.
///
/// The text is lowercased, whitespace runs collapse to one space and a space
/// pads each end. Every character 3-, 4- and 5-gram is hashed with
/// [`seeded_fnv1a`]; the hash modulo `dim` picks the bucket and its top bit
/// the sign (+1 when clear). The count vector is L2-normalized and each
/// component rounded to `f32`. Vectors depend on the text alone.
pub fn builtin_embed(requirements: &[Requirement], dim: usize, seed: u64) -> Result<EmbeddingStore> {
    if dim < MIN_BUILTIN_DIM {
        return Err(Error::InvalidArgument(format!(
            "builtin embedding dimension must be at least {MIN_BUILTIN_DIM}, got {dim}"
        )));
    }
    let mut store = EmbeddingStore::new(dim);
    for r in requirements {
        store.insert(r.id.clone(), embed_text(&r.text, dim, seed))?;
    }
    Ok(store)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub pair: PairKey,
    pub values: Vec<f64>,
}

/// `concat(u, v, u − v)` for `u = vec(id1)`, `v = vec(id2)`.
pub fn pair_feature(store: &EmbeddingStore, pair: &RequirementPair) -> Result<FeatureVector> {
    let get = |id: &str| store.get(id).ok_or_else(|| Error::MissingEmbedding(id.to_string()));
    let u = get(&pair.id1)?;
    let v = get(&pair.id2)?;
    let mut values = Vec::with_capacity(3 * store.dim());
    values.extend_from_slice(u);
    values.extend_from_slice(v);
    values.extend(u.iter().zip(v).map(|(a, b)| a - b));
    Ok(FeatureVector {
        pair: pair.key(),
        values,
    })
}

pub fn pair_features(store: &EmbeddingStore, pairs: &[RequirementPair]) -> Result<Vec<FeatureVector>> {
    pairs.iter().map(|p| pair_feature(store, p)).collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn store(entries: &[(&str, Vec<f64>)]) -> EmbeddingStore {
        let mut s = EmbeddingStore::new(entries[0].1.len());
        for (id, v) in entries {
            s.insert(*id, v.clone()).unwrap();
        }
        s
    }

    fn load_str(body: &str) -> Result<EmbeddingStore> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.jsonl");
        std::fs::write(&p, body).unwrap();
        load_embeddings(&p)
    }

    #[test]
    fn load_two_records() {
        let s = load_str("{\"id\":\"a\",\"vec\":[1,2,3,4]}\n{\"id\":\"b\",\"vec\":[0.5,0,0,1]}\n").unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn load_dimension_mismatch() {
        let err = load_str("{\"id\":\"a\",\"vec\":[1,2,3,4]}\n{\"id\":\"b\",\"vec\":[1,2,3]}\n").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { id, expected: 4, got: 3 } if id == "b"));
    }

    #[test]
    fn load_non_finite() {
        let err = load_str("{\"id\":\"a\",\"vec\":[1,NaN,3]}\n").unwrap_err();
        assert!(matches!(err, Error::NonFinite(id) if id == "a"));
        let err = load_str("{\"id\":\"a\",\"vec\":[1,1e300]}\n").unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn load_duplicate() {
        let err = load_str("{\"id\":\"a\",\"vec\":[1]}\n{\"id\":\"a\",\"vec\":[2]}\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateId(_)));
    }

    #[test]
    fn feature_formula() {
        let s = store(&[("a", vec![1.0, 2.0]), ("b", vec![3.0, 5.0])]);
        let f = pair_feature(&s, &RequirementPair::new("a", "b", None).unwrap()).unwrap();
        assert_eq!(f.values, vec![1.0, 2.0, 3.0, 5.0, -2.0, -3.0]);
    }

    #[test]
    fn feature_identity() {
        let s = store(&[("a", vec![0.5, -1.0]), ("b", vec![0.5, -1.0])]);
        let f = pair_feature(&s, &RequirementPair::new("a", "b", None).unwrap()).unwrap();
        assert_eq!(f.values, vec![0.5, -1.0, 0.5, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn feature_length_for_768() {
        let s = store(&[("a", vec![0.1; 768]), ("b", vec![0.2; 768])]);
        let f = pair_feature(&s, &RequirementPair::new("a", "b", None).unwrap()).unwrap();
        assert_eq!(f.values.len(), 2304);
    }

    #[test]
    fn feature_missing_embedding() {
        let s = store(&[("a", vec![1.0])]);
        let err = pair_feature(&s, &RequirementPair::new("a", "z", None).unwrap()).unwrap_err();
        assert!(matches!(err, Error::MissingEmbedding(id) if id == "z"));
    }

    #[test]
    fn builtin_identical_texts() {
        let reqs = vec![
            Requirement::new("a", "d", "The UAV shall fly."),
            Requirement::new("b", "d", "The UAV shall fly."),
            Requirement::new("c", "d", "The pilot shall land the UAV."),
        ];
        let s = builtin_embed(&reqs, 64, 3).unwrap();
        assert_eq!(s.get("a"), s.get("b"));
        assert_ne!(s.get("a"), s.get("c"));
        for (_, v) in s.iter() {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-6);
        }
        assert!(builtin_embed(&reqs, 8, 0).is_err());
    }

    #[test]
    fn builtin_survives_disk() {
        let reqs = vec![
            Requirement::new("a", "d", "The UAV shall fly."),
            Requirement::new("b", "d", "All data shall be encrypted."),
        ];
        let s = builtin_embed(&reqs, 32, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.jsonl");
        write_embeddings(&p, &s).unwrap();
        assert_eq!(load_embeddings(&p).unwrap(), s);
    }

    #[test]
    fn fnv_reference() {
        // FNV-1a 64 of "a" with zero seed bytes prepended
        let mut h = FNV_OFFSET;
        for b in [0u8, 0, 0, 0, 0, 0, 0, 0, b'a'] {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        assert_eq!(seeded_fnv1a(0, b"a"), h);
    }

    proptest! {
        #[test]
        fn feature_blocks(u in proptest::collection::vec(-10.0f64..10.0, 1..16), alpha in -5.0f64..5.0) {
            let v: Vec<f64> = u.iter().map(|x| x * 0.5 - 1.0).collect();
            let s = store(&[("a", u.clone()), ("b", v.clone())]);
            let p = RequirementPair::new("a", "b", None).unwrap();
            let f = pair_feature(&s, &p).unwrap();
            let d = u.len();
            prop_assert_eq!(f.values.len(), 3 * d);

            let scaled: Vec<f64> = u.iter().map(|x| alpha * x).collect();
            let s2 = store(&[("a", scaled), ("b", v.clone())]);
            let g = pair_feature(&s2, &p).unwrap();
            for i in 0..d {
                prop_assert!((g.values[i] - alpha * f.values[i]).abs() < 1e-9);
                prop_assert_eq!(g.values[d + i], f.values[d + i]);
                prop_assert!((g.values[2 * d + i] - (alpha * u[i] - v[i])).abs() < 1e-9);
            }
        }

        #[test]
        fn builtin_order_independent(seed: u64, rot in 0usize..4) {
            let mut reqs = vec![
                Requirement::new("a", "d", "The UAV shall fly."),
                Requirement::new("b", "d", "The pilot shall land."),
                Requirement::new("c", "d", "All logs shall be kept."),
                Requirement::new("e", "d", "Data shall be encrypted."),
            ];
            let s1 = builtin_embed(&reqs, 16, seed).unwrap();
            reqs.rotate_left(rot);
            let s2 = builtin_embed(&reqs, 16, seed).unwrap();
            prop_assert_eq!(s1, s2);
        }
    }
}
