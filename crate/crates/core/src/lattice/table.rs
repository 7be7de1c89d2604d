use rayon::prelude::*;

use super::set::{check_n, full_mask, VariableSet};
use crate::error::{Error, Result};

/// Relative tolerance for exact lattice identities in double precision.
pub const EXACT_TOLERANCE: f64 = 1e-9;

const EVAL_CHUNK: usize = 1024;

/// A scalar value function over full feature vectors.
///
/// Implementations must be deterministic. When [`is_reentrant`] returns
/// true, profile construction may evaluate disjoint batches concurrently.
///
/// [`is_reentrant`]: ValueFunction::is_reentrant
pub trait ValueFunction: Send + Sync {
    fn evaluate(&self, input: &[f64]) -> f64;

    /// Evaluates a row-major batch with `dim` columns into `out`.
    fn evaluate_batch(&self, inputs: &[f64], dim: usize, out: &mut [f64]) {
        for (row, slot) in inputs.chunks_exact(dim).zip(out.iter_mut()) {
            *slot = self.evaluate(row);
        }
    }

    fn is_reentrant(&self) -> bool {
        false
    }
}

impl<F: ValueFunction + ?Sized> ValueFunction for &F {
    fn evaluate(&self, input: &[f64]) -> f64 {
        (**self).evaluate(input)
    }

    fn evaluate_batch(&self, inputs: &[f64], dim: usize, out: &mut [f64]) {
        (**self).evaluate_batch(inputs, dim, out)
    }

    fn is_reentrant(&self) -> bool {
        (**self).is_reentrant()
    }
}

/// Dense table of `v(x_T)` for every mask `T` of one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueProfile {
    n: usize,
    values: Vec<f64>,
}

/// Dense table of Harsanyi dividends `I(S|x)` for every subset `S`.
///
/// Immutable once built; produced by [`harsanyi_transform`] or, for
/// hand-constructed fixtures, [`InteractionTable::from_effects`].
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionTable {
    n: usize,
    effects: Vec<f64>,
}

fn validate_dense(values: &[f64]) -> Result<usize> {
    let len = values.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    let n = len.trailing_zeros() as usize;
    check_n(n)?;
    if let Some((mask, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            mask: mask as u64,
            value,
        });
    }
    Ok(n)
}

impl ValueProfile {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = validate_dense(&values)?;
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, set: VariableSet) -> f64 {
        self.values[set.index()]
    }

    /// `v(x_N)`, the unmasked model output.
    pub fn full_value(&self) -> f64 {
        self.values[full_mask(self.n)]
    }

    /// `v(x_∅)`, the all-masked baseline output.
    pub fn empty_value(&self) -> f64 {
        self.values[0]
    }

    /// Elementwise sum of two profiles over the same variables.
    pub fn add(&self, other: &ValueProfile) -> Result<ValueProfile> {
        same_n(self.n, other.n)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        ValueProfile::from_values(values)
    }

    pub fn scale(&self, factor: f64) -> Result<ValueProfile> {
        ValueProfile::from_values(self.values.iter().map(|v| v * factor).collect())
    }

    /// Relabels variables: variable `i` of `self` becomes variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<ValueProfile> {
        let values = permute_dense(&self.values, self.n, perm)?;
        Ok(ValueProfile { n: self.n, values })
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl InteractionTable {
    pub fn from_effects(effects: Vec<f64>) -> Result<Self> {
        let n = validate_dense(&effects)?;
        Ok(Self { n, effects })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn effects(&self) -> &[f64] {
        &self.effects
    }

    pub fn get(&self, set: VariableSet) -> f64 {
        self.effects[set.index()]
    }

    /// Iterates `(S, I(S|x))` in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = (VariableSet, f64)> + '_ {
        let n = self.n;
        self.effects
            .iter()
            .enumerate()
            .map(move |(m, &e)| (VariableSet::from_raw(m, n), e))
    }

    /// Sum of all dividends.
    pub fn total(&self) -> f64 {
        self.effects.iter().sum()
    }

    pub fn permute(&self, perm: &[usize]) -> Result<InteractionTable> {
        let effects = permute_dense(&self.effects, self.n, perm)?;
        Ok(InteractionTable { n: self.n, effects })
    }

    /// Recovers the full value profile by the fast zeta transform.
    pub fn to_profile(&self) -> ValueProfile {
        let mut values = self.effects.clone();
        zeta_in_place(&mut values);
        ValueProfile { n: self.n, values }
    }
}

fn same_n(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn permute_dense(values: &[f64], n: usize, perm: &[usize]) -> Result<Vec<f64>> {
    same_n(n, perm.len())?;
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
    }
    let mut out = vec![0.0; values.len()];
    for (mask, &v) in values.iter().enumerate() {
        let mut image = 0usize;
        for (i, &p) in perm.iter().enumerate() {
            if mask & (1 << i) != 0 {
                image |= 1 << p;
            }
        }
        out[image] = v;
    }
    Ok(out)
}

/// In-place Möbius transform over the subset lattice: O(n·2^n) subtractions.
pub(crate) fn mobius_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut bit = 1;
    while bit < len {
        for block in values.chunks_exact_mut(bit * 2) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h -= *l;
            }
        }
        bit <<= 1;
    }
}

/// In-place zeta (subset-sum) transform, inverse of [`mobius_in_place`].
pub(crate) fn zeta_in_place(values: &mut [f64]) {
    let len = values.len();
    let mut bit = 1;
    while bit < len {
        for block in values.chunks_exact_mut(bit * 2) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h += *l;
            }
        }
        bit <<= 1;
    }
}

/// Harsanyi dividends `I(S|x) = Σ_{T⊆S} (-1)^{|S|-|T|} v(x_T)` for every `S`.
pub fn harsanyi_transform(profile: &ValueProfile) -> InteractionTable {
    let mut effects = profile.values.clone();
    mobius_in_place(&mut effects);
    InteractionTable {
        n: profile.n,
        effects,
    }
}

/// `v(x_S) = Σ_{T⊆S} I(T|x)`.
pub fn reconstruct_value(table: &InteractionTable, set: VariableSet) -> f64 {
    debug_assert_eq!(set.n(), table.n);
    set.subsets().map(|t| table.effects[t.index()]).sum()
}

/// `|Σ_S I(S|x) − v(x_N)|`.
pub fn efficiency_residual(profile: &ValueProfile, table: &InteractionTable) -> Result<f64> {
    same_n(profile.n, table.n)?;
    Ok((table.total() - profile.full_value()).abs())
}

/// Tolerance the efficiency residual must meet for a transformed table.
pub fn efficiency_tolerance(profile: &ValueProfile) -> f64 {
    EXACT_TOLERANCE * profile.full_value().abs().max(1.0)
}

/// Evaluates `value_fn` on the sample with every variable outside mask `m`
/// replaced by its baseline value, for all `2^n` masks.
pub fn build_value_profile<F>(value_fn: &F, sample: &[f64], baseline: &[f64]) -> Result<ValueProfile>
where
    F: ValueFunction + ?Sized,
{
    let n = sample.len();
    same_n(n, baseline.len())?;
    check_n(n)?;
    let values = evaluate_masks(value_fn, n, n, |mask, row| {
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = if mask & (1 << i) != 0 {
                sample[i]
            } else {
                baseline[i]
            };
        }
    })?;
    Ok(ValueProfile { n, values })
}

/// Issues exactly `2^n` evaluations, one per mask, building each input with
/// `fill(mask, row)`. Batches run in parallel only for reentrant functions;
/// otherwise masks are evaluated serially in ascending order.
pub(crate) fn evaluate_masks<F, G>(value_fn: &F, n: usize, dim: usize, fill: G) -> Result<Vec<f64>>
where
    F: ValueFunction + ?Sized,
    G: Fn(usize, &mut [f64]) + Sync,
{
    let total = 1usize << n;
    let mut values = vec![0.0; total];
    let run_chunk = |(c, out): (usize, &mut [f64])| {
        let start = c * EVAL_CHUNK;
        let mut inputs = vec![0.0; out.len() * dim];
        for (k, row) in inputs.chunks_exact_mut(dim).enumerate() {
            fill(start + k, row);
        }
        value_fn.evaluate_batch(&inputs, dim, out);
    };
    if value_fn.is_reentrant() && total > EVAL_CHUNK {
        values
            .par_chunks_mut(EVAL_CHUNK)
            .enumerate()
            .for_each(run_chunk);
    } else {
        values.chunks_mut(EVAL_CHUNK).enumerate().for_each(run_chunk);
    }
    if let Some((mask, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            mask: mask as u64,
            value,
        });
    }
    Ok(values)
}
