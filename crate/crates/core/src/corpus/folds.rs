use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Label, PairDataset, PairKey, RequirementPair};
use crate::error::{Error, Result};

/// Assignment of every labeled pair to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: BTreeMap<PairKey, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, key: &PairKey) -> Option<usize> {
        self.assignments.get(key).copied()
    }

    /// `(train, test)` pairs for `fold`, both in canonical key order.
    pub fn split(&self, dataset: &PairDataset, fold: usize) -> (Vec<RequirementPair>, Vec<RequirementPair>) {
        dataset
            .sorted_pairs()
            .into_iter()
            .filter(|p| self.assignments.contains_key(&p.key()))
            .partition(|p| self.fold_of(&p.key()) != Some(fold))
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignments.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold assignment.
///
/// Pairs of each class are sorted by key, shuffled with a seeded ChaCha8
/// stream and dealt round-robin. The dealing position carries over from one
/// class to the next, so per-class and overall fold sizes both differ by at
/// most one. The result does not depend on the input pair order.
pub fn stratified_kfold(dataset: &PairDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let mut by_class: BTreeMap<Label, Vec<PairKey>> = BTreeMap::new();
    for p in &dataset.pairs {
        let label = p
            .label
            .ok_or_else(|| Error::Unlabeled(p.id1.clone(), p.id2.clone()))?;
        by_class.entry(label).or_default().push(p.key());
    }
    for (label, keys) in &by_class {
        if keys.len() < k {
            return Err(Error::ClassTooSmall {
                class: label.to_string(),
                count: keys.len(),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = BTreeMap::new();
    let mut cursor = 0usize;
    for keys in by_class.values_mut() {
        keys.sort();
        keys.shuffle(&mut rng);
        for key in keys.drain(..) {
            assignments.insert(key, cursor % k);
            cursor += 1;
        }
    }
    Ok(FoldPlan { k, seed, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_pairs, Mode, Requirement};
    use proptest::prelude::*;

    fn dataset(counts: &[(Label, usize)]) -> PairDataset {
        let reqs: Vec<_> = (0..30)
            .map(|i| Requirement::new(format!("r{i:02}"), "d", "some text"))
            .collect();
        let d = PairDataset::new("t", Mode::Cdn, reqs).unwrap();
        let mut all = generate_pairs(&d).unwrap().into_iter();
        let mut pairs = Vec::new();
        for &(label, c) in counts {
            pairs.extend(all.by_ref().take(c).map(|p| RequirementPair {
                label: Some(label),
                ..p
            }));
        }
        d.with_pairs(pairs).unwrap()
    }

    fn class_sizes(plan: &FoldPlan, d: &PairDataset, label: Label) -> Vec<usize> {
        let mut sizes = vec![0; plan.k];
        for p in d.pairs.iter().filter(|p| p.label == Some(label)) {
            sizes[plan.fold_of(&p.key()).unwrap()] += 1;
        }
        sizes
    }

    #[test]
    fn even_two_fold() {
        let d = dataset(&[(Label::Conflict, 10), (Label::Neutral, 10)]);
        let plan = stratified_kfold(&d, 2, 1).unwrap();
        assert_eq!(class_sizes(&plan, &d, Label::Conflict), vec![5, 5]);
        assert_eq!(class_sizes(&plan, &d, Label::Neutral), vec![5, 5]);
    }

    #[test]
    fn pigeonhole() {
        let d = dataset(&[(Label::Conflict, 20)]);
        let plan = stratified_kfold(&d, 3, 9).unwrap();
        assert_eq!(class_sizes(&plan, &d, Label::Conflict), vec![7, 7, 6]);
    }

    #[test]
    fn deterministic() {
        let d = dataset(&[(Label::Conflict, 13), (Label::Neutral, 17)]);
        assert_eq!(stratified_kfold(&d, 3, 4).unwrap(), stratified_kfold(&d, 3, 4).unwrap());
    }

    #[test]
    fn small_class_named() {
        let d = dataset(&[(Label::Conflict, 10), (Label::Duplicate, 2)]);
        match stratified_kfold(&d, 3, 0) {
            Err(Error::ClassTooSmall { class, .. }) => assert_eq!(class, "duplicate"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn input_order_irrelevant() {
        let d = dataset(&[(Label::Conflict, 11), (Label::Neutral, 19)]);
        let mut rev = d.clone();
        rev.pairs.reverse();
        assert_eq!(stratified_kfold(&d, 4, 2).unwrap(), stratified_kfold(&rev, 4, 2).unwrap());
    }

    proptest! {
        #[test]
        fn folds_partition_and_balance(
            c in 5usize..60, dup in 5usize..60, n in 5usize..60, k in 2usize..6, seed: u64
        ) {
            let d = dataset(&[(Label::Conflict, c), (Label::Duplicate, dup), (Label::Neutral, n)]);
            let plan = stratified_kfold(&d, k, seed).unwrap();
            prop_assert_eq!(plan.assignments.len(), d.pairs.len());
            for label in Label::ALL {
                let sizes = class_sizes(&plan, &d, label);
                let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
                prop_assert!(hi - lo <= 1);
            }
            let mut seen = 0;
            for f in 0..k {
                let (train, test) = plan.split(&d, f);
                prop_assert_eq!(train.len() + test.len(), d.pairs.len());
                seen += test.len();
            }
            prop_assert_eq!(seen, d.pairs.len());
        }
    }
}
