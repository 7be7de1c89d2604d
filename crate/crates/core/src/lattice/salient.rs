use serde::Serialize;

use super::set::VariableSet;
use super::table::InteractionTable;
use crate::error::{Error, Result};

/// The concepts of one sample whose absolute dividend strictly exceeds
/// `τ = λ · max_S |I(S|x)|`, the maximum taken over the candidate subsets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SalientSet {
    n: usize,
    /// Ascending by mask.
    members: Vec<(VariableSet, f64)>,
    threshold_ratio: f64,
    threshold: f64,
    include_empty: bool,
}

impl SalientSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn threshold_ratio(&self) -> f64 {
        self.threshold_ratio
    }

    /// Absolute threshold `τ`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn include_empty(&self) -> bool {
        self.include_empty
    }

    pub fn iter(&self) -> impl Iterator<Item = (VariableSet, f64)> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> impl Iterator<Item = VariableSet> + '_ {
        self.members.iter().map(|&(s, _)| s)
    }

    pub fn effect(&self, set: VariableSet) -> Option<f64> {
        self.members
            .binary_search_by_key(&set, |&(s, _)| s)
            .ok()
            .map(|i| self.members[i].1)
    }

    pub fn contains(&self, set: VariableSet) -> bool {
        self.effect(set).is_some()
    }

    /// Number of members shared with `other`.
    pub fn overlap(&self, other: &SalientSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].0.cmp(&other.members[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold ratio must lie in (0, 1), got {ratio}"
        )));
    }
    Ok(())
}

/// Extracts the salient concepts of one table.
///
/// With `include_empty == false` the empty set neither competes for the
/// maximum nor becomes a member. An all-zero table yields an empty set.
pub fn salient_set(table: &InteractionTable, ratio: f64, include_empty: bool) -> Result<SalientSet> {
    check_ratio(ratio)?;
    let skip = usize::from(!include_empty);
    let candidates = || table.iter().skip(skip);
    let max = candidates().fold(0.0f64, |m, (_, e)| m.max(e.abs()));
    let threshold = ratio * max;
    let members = candidates().filter(|(_, e)| e.abs() > threshold).collect();
    Ok(SalientSet {
        n: table.n(),
        members,
        threshold_ratio: ratio,
        threshold,
        include_empty,
    })
}

/// Averaged, descending curve of `|I(S|x)| / max_S' |I(S'|x)|`.
///
/// Each table is normalized by its own maximum, sorted descending, and the
/// sorted curves are averaged rank by rank. The curve has `2^n` points, or
/// `2^n − 1` when the empty set is excluded.
pub fn normalized_strength_curve(tables: &[InteractionTable], include_empty: bool) -> Result<Vec<f64>> {
    let first = tables.first().ok_or(Error::Empty("no tables"))?;
    let n = first.n();
    let skip = usize::from(!include_empty);
    let len = (1usize << n) - skip;
    let mut curve = vec![0.0; len];
    let mut sorted = Vec::with_capacity(len);
    for table in tables {
        if table.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: table.n(),
            });
        }
        sorted.clear();
        sorted.extend(table.effects()[skip..].iter().map(|e| e.abs()));
        let max = sorted.iter().fold(0.0f64, |m, &e| m.max(e));
        if max > 0.0 {
            sorted.iter_mut().for_each(|e| *e /= max);
        }
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        for (acc, e) in curve.iter_mut().zip(&sorted) {
            *acc += e;
        }
    }
    let count = tables.len() as f64;
    curve.iter_mut().for_each(|c| *c /= count);
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(effects: &[f64]) -> InteractionTable {
        InteractionTable::from_effects(effects.to_vec()).unwrap()
    }

    #[test]
    fn thresholds_relative_to_non_empty_maximum() {
        let t = table(&[100.0, 1.0, 0.04, 0.5, -0.2, 0.0, 0.0, 0.0]);
        let s = salient_set(&t, 0.05, false).unwrap();
        let kept: Vec<f64> = s.iter().map(|(_, e)| e).collect();
        assert_eq!(kept, vec![1.0, 0.5, -0.2]);
        assert!((s.threshold() - 0.05).abs() < 1e-15);

        let with_empty = salient_set(&t, 0.05, true).unwrap();
        assert_eq!(with_empty.len(), 1);
        assert!(with_empty.contains(VariableSet::empty(3).unwrap()));
    }

    #[test]
    fn degenerate_table_is_empty() {
        let s = salient_set(&table(&[0.0; 8]), 0.1, false).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn threshold_is_strict() {
        let s = salient_set(&table(&[0.0, 1.0, 0.5, 0.25]), 0.5, false).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn ratio_must_be_open_unit_interval() {
        let t = table(&[0.0, 1.0]);
        assert!(salient_set(&t, 0.0, false).is_err());
        assert!(salient_set(&t, 1.0, false).is_err());
    }

    #[test]
    fn strength_curve_normalizes_and_sorts() {
        let t = table(&[9.0, 2.0, -1.0, 0.5]);
        assert_eq!(normalized_strength_curve(std::slice::from_ref(&t), false).unwrap(), vec![1.0, 0.5, 0.25]);
        assert_eq!(
            normalized_strength_curve(&[t.clone(), t.clone()], false).unwrap(),
            vec![1.0, 0.5, 0.25]
        );
        assert_eq!(normalized_strength_curve(&[t], true).unwrap().len(), 4);
        assert!(normalized_strength_curve(&[], false).is_err());
    }

    #[test]
    fn overlap_counts_shared_members() {
        let a = salient_set(&table(&[0.0, 1.0, 1.0, 0.0]), 0.5, false).unwrap();
        let b = salient_set(&table(&[0.0, 0.0, 1.0, 1.0]), 0.5, false).unwrap();
        assert_eq!(a.overlap(&b), 1);
        assert_eq!(a.overlap(&a), 2);
    }
}
