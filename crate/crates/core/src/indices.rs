//! Shapley-family indices derived from Harsanyi dividends, plus an exact
//! permutation oracle for the Shapley value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{InteractionTable, ValueProfile, VariableSet};

/// Largest variable count the permutation oracle enumerates (`10! ≈ 3.6M`).
pub const ORACLE_MAX_VARIABLES: usize = 10;

/// Per-variable attributions `φ(i|x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttributionVector {
    pub values: Vec<f64>,
}

impl AttributionVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Shapley values by sharing each dividend equally among its members:
/// `φ(i) = Σ_{S ∋ i} I(S) / |S|`.
pub fn shapley_from_dividends(table: &InteractionTable) -> AttributionVector {
    let mut values = vec![0.0; table.n()];
    for (set, effect) in table.iter().skip(1) {
        let share = effect / set.len() as f64;
        for i in set.indices() {
            values[i] += share;
        }
    }
    AttributionVector { values }
}

/// Exact Shapley values as the average marginal contribution over all `n!`
/// orderings of the variables.
pub fn shapley_permutation_oracle(profile: &ValueProfile) -> Result<AttributionVector> {
    let n = profile.n();
    if n > ORACLE_MAX_VARIABLES {
        return Err(Error::InvalidParameter(format!(
            "permutation oracle supports at most {ORACLE_MAX_VARIABLES} variables, got {n}"
        )));
    }
    let v = profile.values();
    let mut totals = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    let mut visit = |order: &[usize]| {
        let mut mask = 0usize;
        for &i in order {
            let next = mask | 1 << i;
            totals[i] += v[next] - v[mask];
            mask = next;
        }
        count += 1;
    };
    visit(&order);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let count = count as f64;
    Ok(AttributionVector {
        values: totals.into_iter().map(|t| t / count).collect(),
    })
}

fn check_query(table: &InteractionTable, set: VariableSet) -> Result<()> {
    if set.n() != table.n() {
        return Err(Error::DimensionMismatch {
            expected: table.n(),
            actual: set.n(),
        });
    }
    Ok(())
}

/// Shapley interaction index `Σ_{S⊆N∖T} I(S ∪ T) / (|S| + 1)`.
pub fn shapley_interaction_index(table: &InteractionTable, coalition: VariableSet) -> Result<f64> {
    check_query(table, coalition)?;
    if coalition.is_empty() {
        return Err(Error::InvalidParameter("interaction index needs a non-empty set".into()));
    }
    Ok(coalition
        .complement()
        .subsets()
        .map(|s| table.get(s.union(coalition)) / (s.len() + 1) as f64)
        .sum())
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `k`-th order Shapley-Taylor index: `I(T)` below order `k`, the
/// `binom(|S|+k, k)^{-1}`-weighted sum of supersets at order `k`, and zero
/// above it.
pub fn shapley_taylor_index(table: &InteractionTable, coalition: VariableSet, order: usize) -> Result<f64> {
    check_query(table, coalition)?;
    if order == 0 || order > table.n() {
        return Err(Error::InvalidParameter(format!(
            "order must lie in 1..={}, got {order}",
            table.n()
        )));
    }
    let size = coalition.len();
    Ok(match size.cmp(&order) {
        std::cmp::Ordering::Less => table.get(coalition),
        std::cmp::Ordering::Greater => 0.0,
        std::cmp::Ordering::Equal => coalition
            .complement()
            .subsets()
            .map(|s| table.get(s.union(coalition)) / binomial(s.len() + order, order))
            .sum(),
    })
}
