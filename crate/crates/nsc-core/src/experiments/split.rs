//! Stratified 70/15/15 splits, deterministic given a seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{derive_seed_indexed, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "validation" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!(
                "unknown split {other:?} (expected train, validation, or test)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

/// Per-entry split assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAssignment {
    assignments: BTreeMap<String, Split>,
    pub seed: u64,
}

impl SplitAssignment {
    pub fn get(&self, id: &str) -> Option<Split> {
        self.assignments.get(id).copied()
    }

    /// (train, validation, test) sizes.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for s in self.assignments.values() {
            match s {
                Split::Train => c.0 += 1,
                Split::Validation => c.1 += 1,
                Split::Test => c.2 += 1,
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// 70/15/15 counts by largest remainder (ties favor train, then validation).
fn proportion_counts(n: usize) -> (usize, usize, usize) {
    let train = 7 * n / 10;
    let val = 3 * n / 20;
    let test = 3 * n / 20;
    let mut counts = [train, val, test];
    // remainders over the common denominator 20
    let remainders = [(14 * n) % 20, (3 * n) % 20, (3 * n) % 20];
    let mut leftover = n - train - val - test;
    let mut order: Vec<usize> = vec![0, 1, 2];
    order.sort_by_key(|&i| std::cmp::Reverse(remainders[i]));
    let mut i = 0;
    while leftover > 0 {
        counts[order[i % 3]] += 1;
        leftover -= 1;
        i += 1;
    }
    (counts[0], counts[1], counts[2])
}

/// Assigns each (id, label) pair to a split, stratified by label: every
/// class is independently shuffled (seeded) and cut 70/15/15.
pub fn split_dataset(labeled_ids: &[(String, u8)], seed: u64) -> Result<SplitAssignment> {
    let mut by_class: BTreeMap<u8, Vec<&str>> = BTreeMap::new();
    for (id, label) in labeled_ids {
        by_class.entry(*label).or_default().push(id);
    }
    for (label, ids) in &by_class {
        if ids.len() < 20 {
            return Err(Error::Config(format!(
                "class {label} has only {} entries; need at least 20",
                ids.len()
            )));
        }
    }

    let mut assignments = BTreeMap::new();
    for (&label, ids) in &mut by_class {
        ids.sort_unstable();
        let mut rng = seeded_rng(derive_seed_indexed(seed, "split-class", u64::from(label)));
        let mut shuffled = ids.clone();
        shuffled.shuffle(&mut rng);

        let (n_train, n_val, _) = proportion_counts(shuffled.len());
        for (i, id) in shuffled.iter().enumerate() {
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_val {
                Split::Validation
            } else {
                Split::Test
            };
            if assignments.insert((*id).to_string(), split).is_some() {
                return Err(Error::InvalidInput(format!("duplicate id {id:?}")));
            }
        }
    }
    Ok(SplitAssignment { assignments, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(label: u8, n: usize) -> Vec<(String, u8)> {
        (0..n).map(|i| (format!("c{label}-{i:04}"), label)).collect()
    }

    #[test]
    fn exact_proportions_on_divisible_counts() {
        assert_eq!(proportion_counts(100), (70, 15, 15));
        assert_eq!(proportion_counts(20), (14, 3, 3));
    }

    #[test]
    fn largest_remainder_gives_71_15_15_for_101() {
        assert_eq!(proportion_counts(101), (71, 15, 15));
    }

    #[test]
    fn stratified_and_disjoint() {
        let mut labeled = ids(0, 100);
        labeled.extend(ids(1, 100));
        let split = split_dataset(&labeled, 9).unwrap();
        assert_eq!(split.len(), 200);
        assert_eq!(split.counts(), (140, 30, 30));
        // per-class counts are balanced exactly
        for label in [0u8, 1] {
            let train = labeled
                .iter()
                .filter(|(id, l)| *l == label && split.get(id) == Some(Split::Train))
                .count();
            assert_eq!(train, 70);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let mut labeled = ids(0, 33);
        labeled.extend(ids(1, 33));
        let a = split_dataset(&labeled, 4).unwrap();
        let b = split_dataset(&labeled, 4).unwrap();
        assert_eq!(a, b);
        let c = split_dataset(&labeled, 5).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_entries_is_a_config_error() {
        let mut labeled = ids(0, 19);
        labeled.extend(ids(1, 100));
        assert!(split_dataset(&labeled, 0).is_err());
    }

    #[test]
    fn split_names_round_trip() {
        for s in [Split::Train, Split::Validation, Split::Test] {
            assert_eq!(Split::parse(s.as_str()).unwrap(), s);
        }
        assert!(Split::parse("holdout").is_err());
    }
}
