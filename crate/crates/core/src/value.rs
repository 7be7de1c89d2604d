//! Value functions: masking baselines, the log-odds output of a classifier,
//! synthetic ground-truth games, and context-strength averaging.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    build_value_profile, evaluate_masks, ValueFunction, ValueProfile, VariableSet, MAX_VARIABLES,
};

/// Clamp applied to the truth-class probability before taking log-odds.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Default number of trapezoid points for context averaging.
pub const DEFAULT_QUADRATURE_POINTS: usize = 21;

/// How a masked variable is filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaselinePolicy {
    /// Mean of each variable over a reference dataset. `means` stays `None`
    /// until a reference is attached.
    PerVariableMean {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        means: Option<Vec<f64>>,
    },
    Zeros,
    Explicit { vector: Vec<f64> },
}

impl Default for BaselinePolicy {
    fn default() -> Self {
        BaselinePolicy::PerVariableMean { means: None }
    }
}

impl BaselinePolicy {
    /// Per-variable mean over `rows`.
    pub fn per_variable_mean<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("reference dataset"))?;
        let dim = first.as_ref().len();
        let mut means = vec![0.0; dim];
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            for (m, x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        let count = rows.len() as f64;
        means.iter_mut().for_each(|m| *m /= count);
        Ok(BaselinePolicy::PerVariableMean { means: Some(means) })
    }

    /// Fills in an unresolved per-variable mean from `rows`; other policies
    /// are returned unchanged.
    pub fn with_reference<R: AsRef<[f64]>>(self, rows: &[R]) -> Result<Self> {
        match self {
            BaselinePolicy::PerVariableMean { means: None } => Self::per_variable_mean(rows),
            other => Ok(other),
        }
    }

    /// The concrete baseline vector for `n` variables.
    pub fn resolve(&self, n: usize) -> Result<Vec<f64>> {
        let vector = match self {
            BaselinePolicy::Zeros => return Ok(vec![0.0; n]),
            BaselinePolicy::PerVariableMean { means: None } => return Err(Error::UnresolvedBaseline),
            BaselinePolicy::PerVariableMean { means: Some(v) } => v,
            BaselinePolicy::Explicit { vector } => vector,
        };
        if vector.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: vector.len(),
            });
        }
        Ok(vector.clone())
    }
}

/// Copies kept coordinates from `sample` and fills the rest from the baseline.
pub fn mask_sample(sample: &[f64], keep: VariableSet, baseline: &BaselinePolicy) -> Result<Vec<f64>> {
    if keep.n() != sample.len() {
        return Err(Error::DimensionMismatch {
            expected: sample.len(),
            actual: keep.n(),
        });
    }
    let mut out = baseline.resolve(sample.len())?;
    for i in keep.indices() {
        out[i] = sample[i];
    }
    Ok(out)
}

/// `log(p / (1 − p))` for `p` the probability of the truth class.
///
/// `1 − p` is the total mass of every other class. `p` is clamped to
/// `[1e-12, 1 − 1e-12]` so confident predictions stay finite.
pub fn logit_value(probabilities: &[f64], truth: usize) -> Result<f64> {
    if truth >= probabilities.len() {
        return Err(Error::InvalidLabel {
            label: truth,
            classes: probabilities.len(),
        });
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidProbabilities { sum });
    }
    let rest = rest_mass(probabilities, truth);
    Ok(log_odds(probabilities[truth], rest))
}

pub(crate) fn rest_mass(probabilities: &[f64], truth: usize) -> f64 {
    probabilities
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != truth)
        .map(|(_, p)| p)
        .sum()
}

/// `log(p / rest)`, both sides clamped to `[1e-12, 1 − 1e-12]`. The rest
/// mass is summed from the other classes rather than taken as `1 − p`,
/// which would cancel catastrophically for confident predictions.
pub(crate) fn log_odds(p: f64, rest: f64) -> f64 {
    let clamp = |v: f64| v.clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP);
    (clamp(p) / clamp(rest)).ln()
}

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A deterministic value function with a label and a reentrancy flag.
#[derive(Clone)]
pub struct ValueFunctionSpec {
    evaluator: Arc<Evaluator>,
    reentrant: bool,
    description: String,
}

impl ValueFunctionSpec {
    pub fn new<F>(description: impl Into<String>, reentrant: bool, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(evaluator),
            reentrant,
            description: description.into(),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Pointwise sum of two value functions.
    pub fn plus(&self, other: &ValueFunctionSpec) -> ValueFunctionSpec {
        let (a, b) = (self.evaluator.clone(), other.evaluator.clone());
        ValueFunctionSpec {
            evaluator: Arc::new(move |x| a(x) + b(x)),
            reentrant: self.reentrant && other.reentrant,
            description: format!("({}) + ({})", self.description, other.description),
        }
    }
}

impl fmt::Debug for ValueFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueFunctionSpec")
            .field("description", &self.description)
            .field("reentrant", &self.reentrant)
            .finish_non_exhaustive()
    }
}

impl ValueFunction for ValueFunctionSpec {
    fn evaluate(&self, input: &[f64]) -> f64 {
        (self.evaluator)(input)
    }

    fn is_reentrant(&self) -> bool {
        self.reentrant
    }
}

/// A synthetic game over `n` variables in presence encoding: the attached
/// sample is all ones, the baseline all zeros, and a variable counts as
/// unmasked when its coordinate differs from the baseline.
#[derive(Clone, Debug)]
pub struct SyntheticGame {
    n: usize,
    spec: ValueFunctionSpec,
}

impl SyntheticGame {
    fn new(n: usize, spec: ValueFunctionSpec) -> Result<Self> {
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::VariableCount {
                n,
                max: MAX_VARIABLES,
            });
        }
        Ok(Self { n, spec })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &ValueFunctionSpec {
        &self.spec
    }

    pub fn sample(&self) -> Vec<f64> {
        vec![1.0; self.n]
    }

    pub fn baseline(&self) -> Vec<f64> {
        vec![0.0; self.n]
    }

    pub fn profile(&self) -> Result<ValueProfile> {
        build_value_profile(&self.spec, &self.sample(), &self.baseline())
    }

    pub fn plus(&self, other: &SyntheticGame) -> Result<SyntheticGame> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        SyntheticGame::new(self.n, self.spec.plus(&other.spec))
    }
}

fn presence(x: &[f64]) -> usize {
    x.iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// `v_T(x_S) = c` when `T ⊆ S`, else 0.
pub fn make_interaction_game(coalition: VariableSet, c: f64, n: usize) -> Result<SyntheticGame> {
    if coalition.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: coalition.n(),
        });
    }
    if coalition.is_empty() {
        return Err(Error::InvalidParameter("interaction game needs a non-empty coalition".into()));
    }
    let t = coalition.index();
    SyntheticGame::new(
        n,
        ValueFunctionSpec::new(format!("interaction game T={coalition}, c={c}"), true, move |x| {
            if presence(x) & t == t {
                c
            } else {
                0.0
            }
        }),
    )
}

/// `v(x_S) = Σ_{i∈S} w_i`.
pub fn make_additive_game(weights: &[f64]) -> Result<SyntheticGame> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite weight {w}")));
    }
    let w = weights.to_vec();
    SyntheticGame::new(
        weights.len(),
        ValueFunctionSpec::new(format!("additive game w={weights:?}"), true, move |x| {
            let mask = presence(x);
            w.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, w)| w)
                .sum()
        }),
    )
}

/// A game whose `2^n` values are drawn uniformly from `[-amplitude, amplitude]`
/// by a generator seeded with `seed`.
pub fn make_random_game(seed: u64, n: usize, amplitude: f64) -> Result<SyntheticGame> {
    if n == 0 || n > MAX_VARIABLES {
        return Err(Error::VariableCount {
            n,
            max: MAX_VARIABLES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<f64> = (0..1usize << n)
        .map(|_| amplitude * rng.random_range(-1.0..=1.0))
        .collect();
    SyntheticGame::new(
        n,
        ValueFunctionSpec::new(format!("random game seed={seed}, n={n}"), true, move |x| {
            table[presence(x)]
        }),
    )
}

/// Designated context variables averaged over interpolation strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContextSpec {
    pub context: VariableSet,
    pub quadrature_points: usize,
}

impl ContextSpec {
    pub fn new(context: VariableSet) -> Self {
        Self {
            context,
            quadrature_points: DEFAULT_QUADRATURE_POINTS,
        }
    }
}

/// Value profile over the `analyzed` variables with the context variables
/// set to `α·x + (1 − α)·b` and averaged over `α ∈ [0, 1]` by the trapezoid
/// rule on `M` uniform points.
///
/// Profiles are averaged before any transform; by linearity the dividends
/// of the result equal the α-averaged dividends.
pub fn context_averaged_profile<F>(
    value_fn: &F,
    sample: &[f64],
    analyzed: VariableSet,
    ctx: &ContextSpec,
    baseline: &BaselinePolicy,
) -> Result<ValueProfile>
where
    F: ValueFunction + ?Sized,
{
    let dim = sample.len();
    for set in [analyzed, ctx.context] {
        if set.n() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: set.n(),
            });
        }
    }
    if !analyzed.intersection(ctx.context).is_empty()
        || analyzed.union(ctx.context) != VariableSet::full(dim)?
    {
        return Err(Error::InvalidParameter(
            "analyzed and context variables must partition the features".into(),
        ));
    }
    let b = baseline.resolve(dim)?;
    if ctx.context.is_empty() {
        return build_value_profile(value_fn, sample, &b);
    }
    let m = ctx.quadrature_points;
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs at least 2 points, got {m}"
        )));
    }
    let vars: Vec<usize> = analyzed.indices().collect();
    if vars.is_empty() {
        return Err(Error::InvalidParameter("no analyzed variables".into()));
    }
    let ctx_vars: Vec<usize> = ctx.context.indices().collect();
    let step = 1.0 / (m - 1) as f64;
    let mut acc = vec![0.0; 1 << vars.len()];
    for j in 0..m {
        let alpha = j as f64 * step;
        let weight = if j == 0 || j == m - 1 { 0.5 * step } else { step };
        let mut template = b.clone();
        for &c in &ctx_vars {
            template[c] = alpha * sample[c] + (1.0 - alpha) * b[c];
        }
        let values = evaluate_masks(value_fn, vars.len(), dim, |mask, row| {
            row.copy_from_slice(&template);
            for (k, &i) in vars.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    row[i] = sample[i];
                }
            }
        })?;
        for (a, v) in acc.iter_mut().zip(values) {
            *a += weight * v;
        }
    }
    ValueProfile::from_values(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::harsanyi_transform;

    #[test]
    fn masking_replaces_dropped_coordinates() {
        let keep = VariableSet::from_indices(&[0, 2], 3).unwrap();
        assert_eq!(
            mask_sample(&[3.0, 4.0, 5.0], keep, &BaselinePolicy::Zeros).unwrap(),
            vec![3.0, 0.0, 5.0]
        );
        let full = VariableSet::full(3).unwrap();
        assert_eq!(
            mask_sample(&[3.0, 4.0, 5.0], full, &BaselinePolicy::Zeros).unwrap(),
            vec![3.0, 4.0, 5.0]
        );
        let mean = BaselinePolicy::per_variable_mean(&[vec![0.0, 0.0], vec![2.0, 2.0]]).unwrap();
        let none = VariableSet::empty(2).unwrap();
        assert_eq!(mask_sample(&[9.0, 9.0], none, &mean).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn unresolved_mean_is_an_error() {
        let none = VariableSet::empty(2).unwrap();
        assert!(matches!(
            mask_sample(&[1.0, 2.0], none, &BaselinePolicy::default()),
            Err(Error::UnresolvedBaseline)
        ));
        let explicit = BaselinePolicy::Explicit {
            vector: vec![1.0],
        };
        assert!(explicit.resolve(2).is_err());
    }

    #[test]
    fn logit_of_known_probabilities() {
        assert_eq!(logit_value(&[0.5, 0.5], 0).unwrap(), 0.0);
        assert!((logit_value(&[0.1, 0.9], 1).unwrap() - 9f64.ln()).abs() < 1e-12);
        assert!((logit_value(&[0.9, 0.1], 0).unwrap() - 2.1972245773362196).abs() < 1e-12);
        let clamped = logit_value(&[0.0, 1.0], 1).unwrap();
        let expected = ((1.0 - 1e-12) / 1e-12f64).ln();
        assert!((clamped - expected).abs() < 1e-9);
        assert!((clamped - 27.631021115).abs() < 1e-6);
        assert!(matches!(logit_value(&[0.5, 0.5], 2), Err(Error::InvalidLabel { .. })));
        assert!(matches!(
            logit_value(&[0.5, 0.6], 0),
            Err(Error::InvalidProbabilities { .. })
        ));
    }

    #[test]
    fn multi_class_logit_uses_rest_mass() {
        let v = logit_value(&[0.2, 0.3, 0.5], 2).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn interaction_game_profile_is_indicator() {
        let t = VariableSet::from_indices(&[1], 2).unwrap();
        let game = make_interaction_game(t, 1.0, 2).unwrap();
        let p = game.profile().unwrap();
        assert_eq!(p.values(), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(harsanyi_transform(&p).effects(), &[0.0, 0.0, 1.0, 0.0]);
        assert!(make_interaction_game(VariableSet::empty(2).unwrap(), 1.0, 2).is_err());
    }

    #[test]
    fn summed_games_superpose() {
        let a = make_interaction_game(VariableSet::from_indices(&[0, 1], 3).unwrap(), 2.0, 3).unwrap();
        let b = make_interaction_game(VariableSet::from_indices(&[2], 3).unwrap(), -1.0, 3).unwrap();
        let t = harsanyi_transform(&a.plus(&b).unwrap().profile().unwrap());
        let mut expected = [0.0; 8];
        expected[0b011] = 2.0;
        expected[0b100] = -1.0;
        assert_eq!(t.effects(), &expected[..]);
    }

    #[test]
    fn additive_game_has_no_interactions() {
        let p = make_additive_game(&[1.0, 2.0]).unwrap().profile().unwrap();
        assert_eq!(p.values(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(harsanyi_transform(&p).effects(), &[0.0, 1.0, 2.0, 0.0]);
        let zero = make_additive_game(&[0.0; 4]).unwrap().profile().unwrap();
        assert!(harsanyi_transform(&zero).effects().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn random_games_are_seeded() {
        let a = make_random_game(3, 5, 2.0).unwrap().profile().unwrap();
        let b = make_random_game(3, 5, 2.0).unwrap().profile().unwrap();
        let c = make_random_game(4, 5, 2.0).unwrap().profile().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.values().iter().all(|v| v.abs() <= 2.0));
    }

    fn split(dim: usize, ctx: &[usize]) -> (VariableSet, ContextSpec) {
        let c = VariableSet::from_indices(ctx, dim).unwrap();
        (c.complement(), ContextSpec::new(c))
    }

    #[test]
    fn empty_context_matches_plain_profile_exactly() {
        let f = ValueFunctionSpec::new("poly", false, |x| x[0] * x[1] + x[2].sin());
        let sample = [0.3, -1.2, 2.0];
        let (analyzed, ctx) = split(3, &[]);
        let b = BaselinePolicy::Explicit {
            vector: vec![0.1, 0.2, 0.3],
        };
        let avg = context_averaged_profile(&f, &sample, analyzed, &ctx, &b).unwrap();
        let plain = build_value_profile(&f, &sample, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(avg, plain);
    }

    #[test]
    fn context_independent_value_is_unchanged() {
        let f = ValueFunctionSpec::new("ignores x2", false, |x| x[0] * x[1] - x[0]);
        let sample = [0.5, 2.0, 7.0];
        let (analyzed, ctx) = split(3, &[2]);
        let avg = context_averaged_profile(&f, &sample, analyzed, &ctx, &BaselinePolicy::Zeros).unwrap();
        // Same function restricted to the two analyzed coordinates.
        let g = ValueFunctionSpec::new("2d", false, |x| x[0] * x[1] - x[0]);
        let plain = build_value_profile(&g, &[0.5, 2.0], &[0.0, 0.0]).unwrap();
        for (a, b) in avg.values().iter().zip(plain.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_context_is_halved() {
        let f = ValueFunctionSpec::new("linear ctx", false, |x| x[0] * x[2] + x[1]);
        let sample = [1.5, -2.0, 4.0];
        let (analyzed, ctx) = split(3, &[2]);
        let avg = context_averaged_profile(&f, &sample, analyzed, &ctx, &BaselinePolicy::Zeros).unwrap();
        let halved = ValueFunctionSpec::new("halved", false, |x| x[0] * 2.0 + x[1]);
        let plain = build_value_profile(&halved, &[1.5, -2.0], &[0.0, 0.0]).unwrap();
        for (a, b) in avg.values().iter().zip(plain.values()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn quadrature_refinement_converges() {
        let f = ValueFunctionSpec::new("smooth", false, |x| (x[0] + x[2]).tanh() * x[1] + (x[2] * x[0]).exp());
        let sample = [0.7, -0.4, 1.3];
        let (analyzed, mut ctx) = split(3, &[2]);
        ctx.quadrature_points = 21;
        let coarse = context_averaged_profile(&f, &sample, analyzed, &ctx, &BaselinePolicy::Zeros).unwrap();
        ctx.quadrature_points = 201;
        let fine = context_averaged_profile(&f, &sample, analyzed, &ctx, &BaselinePolicy::Zeros).unwrap();
        for (a, b) in coarse.values().iter().zip(fine.values()) {
            assert!((a - b).abs() < 1e-3);
        }
        ctx.quadrature_points = 1;
        assert!(context_averaged_profile(&f, &sample, analyzed, &ctx, &BaselinePolicy::Zeros).is_err());
    }
}
