use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::spins_of;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub spins: Vec<i8>,
    pub count: u64,
}

/// Multiset of ±1 configurations.
///
/// Records are distinct, have positive counts, and are kept in canonical
/// order: ascending basis index, where spin `k` is bit `k` and `−1` is a set
/// bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WireSampleSet", into = "WireSampleSet")]
pub struct SampleSet {
    n: usize,
    records: Vec<SampleRecord>,
    total: u64,
}

/// JSON shape: `{"n": n, "records": [[[s1, ..., sn], count], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct WireSampleSet {
    pub(crate) n: usize,
    pub(crate) records: Vec<(Vec<i8>, u64)>,
}

impl TryFrom<WireSampleSet> for SampleSet {
    type Error = Error;

    fn try_from(w: WireSampleSet) -> Result<Self> {
        SampleSet::from_records(
            w.n,
            w.records.into_iter().map(|(spins, count)| SampleRecord { spins, count }).collect(),
        )
    }
}

impl From<SampleSet> for WireSampleSet {
    fn from(s: SampleSet) -> Self {
        WireSampleSet { n: s.n, records: s.records.into_iter().map(|r| (r.spins, r.count)).collect() }
    }
}

/// Ascending basis-index order for any `n`.
fn canonical_cmp(a: &[i8], b: &[i8]) -> std::cmp::Ordering {
    a.iter().rev().map(|&s| s < 0).cmp(b.iter().rev().map(|&s| s < 0))
}

impl SampleSet {
    pub fn empty(n: usize) -> Self {
        Self { n, records: Vec::new(), total: 0 }
    }

    /// Build from records, merging duplicates. Zero counts are rejected.
    pub fn from_records(n: usize, records: Vec<SampleRecord>) -> Result<Self> {
        let mut counter = SampleCounter::new(n);
        for r in records {
            if r.spins.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.spins.len() });
            }
            if r.spins.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::InvalidArgument("spins must be +1 or -1".into()));
            }
            if r.count == 0 {
                return Err(Error::InvalidArgument("record counts must be positive".into()));
            }
            counter.add_n(&r.spins, r.count);
        }
        Ok(counter.finish())
    }

    /// Build from dense counts indexed by basis state.
    pub fn from_index_counts(n: usize, counts: &[u64]) -> Self {
        debug_assert_eq!(counts.len(), 1 << n);
        let records: Vec<SampleRecord> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &count)| SampleRecord { spins: spins_of(x, n), count })
            .collect();
        let total = records.iter().map(|r| r.count).sum();
        Self { n, records, total }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count_of(&self, spins: &[i8]) -> u64 {
        self.records.binary_search_by(|r| canonical_cmp(&r.spins, spins)).map(|i| self.records[i].count).unwrap_or(0)
    }

    /// Union of two sample sets over the same spins.
    pub fn merge(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut counter = SampleCounter::new(self.n);
        for r in self.records.iter().chain(&other.records) {
            counter.add_n(&r.spins, r.count);
        }
        Ok(counter.finish())
    }

    /// Empirical probabilities in basis-index order; requires `n ≤ 24`.
    pub fn dense_frequencies(&self) -> Result<Vec<f64>> {
        if self.n > crate::dynamics::MAX_QUBITS {
            return Err(Error::SizeCap {
                what: "dense frequency table",
                size: self.n,
                cap: crate::dynamics::MAX_QUBITS,
            });
        }
        let mut out = vec![0.0; 1 << self.n];
        if self.total == 0 {
            return Ok(out);
        }
        for r in &self.records {
            out[crate::dynamics::index_of(&r.spins)] = r.count as f64 / self.total as f64;
        }
        Ok(out)
    }
}

/// Accumulates configurations into a [`SampleSet`].
#[derive(Debug, Clone)]
pub struct SampleCounter {
    n: usize,
    counts: HashMap<Vec<i8>, u64>,
}

impl SampleCounter {
    pub fn new(n: usize) -> Self {
        Self { n, counts: HashMap::new() }
    }

    pub fn add(&mut self, spins: &[i8]) {
        self.add_n(spins, 1);
    }

    pub fn add_n(&mut self, spins: &[i8], count: u64) {
        debug_assert_eq!(spins.len(), self.n);
        if let Some(c) = self.counts.get_mut(spins) {
            *c += count;
        } else {
            self.counts.insert(spins.to_vec(), count);
        }
    }

    pub fn finish(self) -> SampleSet {
        let mut records: Vec<SampleRecord> =
            self.counts.into_iter().map(|(spins, count)| SampleRecord { spins, count }).collect();
        records.sort_by(|a, b| canonical_cmp(&a.spins, &b.spins));
        let total = records.iter().map(|r| r.count).sum();
        SampleSet { n: self.n, records, total }
    }
}

/// Total-variation distance `½ Σ |p − q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_order_and_merge() {
        let s = SampleSet::from_records(
            2,
            vec![
                SampleRecord { spins: vec![-1, -1], count: 1 },
                SampleRecord { spins: vec![1, 1], count: 2 },
                SampleRecord { spins: vec![-1, 1], count: 3 },
                SampleRecord { spins: vec![1, 1], count: 4 },
            ],
        )
        .unwrap();
        let order: Vec<_> = s.records().iter().map(|r| (r.spins.clone(), r.count)).collect();
        assert_eq!(order, vec![(vec![1, 1], 6), (vec![-1, 1], 3), (vec![-1, -1], 1)]);
        assert_eq!(s.total(), 10);
        assert_eq!(s.count_of(&[-1, 1]), 3);
        assert_eq!(s.count_of(&[1, -1]), 0);
        let m = s.merge(&s).unwrap();
        assert_eq!(m.total(), 20);
        assert_eq!(m.count_of(&[1, 1]), 12);
    }

    #[test]
    fn validation() {
        let bad_len = SampleSet::from_records(2, vec![SampleRecord { spins: vec![1], count: 1 }]);
        assert!(matches!(bad_len, Err(Error::DimensionMismatch { .. })));
        let bad_spin = SampleSet::from_records(1, vec![SampleRecord { spins: vec![0], count: 1 }]);
        assert!(bad_spin.is_err());
        let zero = SampleSet::from_records(1, vec![SampleRecord { spins: vec![1], count: 0 }]);
        assert!(zero.is_err());
    }

    #[test]
    fn wire_format() {
        let s = SampleSet::from_index_counts(2, &[3, 0, 1, 0]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"n":2,"records":[[[1,1],3],[[1,-1],1]]}"#);
        assert!(serde_json::from_str::<SampleSet>(r#"{"n":2}"#).is_err());
        assert!(serde_json::from_str::<SampleSet>(r#"{"n":2,"records":[[[1,2],3]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_and_total(counts in proptest::collection::vec(0u64..50, 8)) {
            let s = SampleSet::from_index_counts(3, &counts);
            prop_assert_eq!(s.total(), counts.iter().sum::<u64>());
            let back: SampleSet = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            prop_assert_eq!(&back, &s);
            let dense = s.dense_frequencies().unwrap();
            for (x, c) in counts.iter().enumerate() {
                if s.total() > 0 {
                    prop_assert!((dense[x] - *c as f64 / s.total() as f64).abs() < 1e-15);
                }
            }
        }
    }
}
