//! Concept-quality metrics over populations of interaction tables.

use std::collections::BTreeMap;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{salient_set, InteractionTable, SalientSet, VariableSet};

/// Upper edges of the frequency buckets used when summarizing `β` by `α`.
pub const ALPHA_BUCKETS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

/// A sample mean together with how many samples contributed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub mean: f64,
    pub included: usize,
    pub excluded: usize,
}

/// The `k` concepts salient most often across a population.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConceptDictionary {
    /// Non-increasing frequency, ties by ascending mask.
    pub entries: Vec<VariableSet>,
    pub frequency: Vec<f64>,
    pub requested_k: usize,
    /// How many entries short of `requested_k` the dictionary is, when fewer
    /// concepts were ever salient.
    pub shortfall: usize,
    pub population: usize,
}

impl ConceptDictionary {
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, set: VariableSet) -> bool {
        self.entries.contains(&set)
    }
}

fn salience_counts(salient: &[SalientSet]) -> BTreeMap<VariableSet, usize> {
    let mut counts = BTreeMap::new();
    for s in salient {
        for member in s.members() {
            *counts.entry(member).or_insert(0) += 1;
        }
    }
    counts
}

/// Ranks every ever-salient concept by frequency.
fn ranked_concepts(salient: &[SalientSet]) -> Vec<(VariableSet, usize)> {
    let mut ranked: Vec<_> = salience_counts(salient).into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

/// Top-`k` dictionary by salience frequency. Never padded: when fewer than
/// `k` concepts were ever salient all of them are returned and the gap is
/// recorded in `shortfall`.
pub fn build_dictionary(salient: &[SalientSet], k: usize) -> Result<ConceptDictionary> {
    if salient.is_empty() {
        return Err(Error::Empty("salient-set population"));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("dictionary size must be at least 1".into()));
    }
    let m = salient.len() as f64;
    let ranked = ranked_concepts(salient);
    let take = k.min(ranked.len());
    let (entries, frequency) = ranked[..take]
        .iter()
        .map(|&(s, c)| (s, c as f64 / m))
        .unzip();
    Ok(ConceptDictionary {
        entries,
        frequency,
        requested_k: k,
        shortfall: k - take,
        population: salient.len(),
    })
}

/// `ρ(k) = E_x[|D_k ∩ Ω_x| / |Ω_x|]`, skipping samples with empty `Ω_x`.
pub fn explanation_ratio(dict: &ConceptDictionary, salient: &[SalientSet]) -> Result<Expectation> {
    let mut total = 0.0;
    let mut included = 0;
    for s in salient.iter().filter(|s| !s.is_empty()) {
        let covered = s.members().filter(|m| dict.contains(*m)).count();
        total += covered as f64 / s.len() as f64;
        included += 1;
    }
    if included == 0 {
        return Err(Error::Empty("every salient set is empty"));
    }
    Ok(Expectation {
        mean: total / included as f64,
        included,
        excluded: salient.len() - included,
    })
}

/// `ρ(k)` for every `k` in `ks`, sharing one frequency ranking.
pub fn explanation_ratio_curve(salient: &[SalientSet], ks: &[usize]) -> Result<Vec<(usize, f64)>> {
    ks.iter()
        .map(|&k| {
            let dict = build_dictionary(salient, k)?;
            Ok((k, explanation_ratio(&dict, salient)?.mean))
        })
        .collect()
}

/// `γ = |Ω1 ∩ Ω2| / |Ω1|`.
pub fn cross_model_transfer(first: &SalientSet, second: &SalientSet) -> Result<f64> {
    if first.is_empty() {
        return Err(Error::Empty("first salient set"));
    }
    Ok(first.overlap(second) as f64 / first.len() as f64)
}

/// Mean `γ` over paired samples as the first model's threshold varies.
///
/// The second model's sets use the fixed ratio `second_ratio`; samples
/// whose first set is empty at a given ratio are skipped.
pub fn transfer_curve(
    first: &[InteractionTable],
    second: &[InteractionTable],
    ratios: &[f64],
    second_ratio: f64,
) -> Result<Vec<TransferPoint>> {
    if first.len() != second.len() {
        return Err(Error::DimensionMismatch {
            expected: first.len(),
            actual: second.len(),
        });
    }
    if first.is_empty() {
        return Err(Error::Empty("no paired tables"));
    }
    let reference: Vec<SalientSet> = second
        .iter()
        .map(|t| salient_set(t, second_ratio, false))
        .collect::<Result<_>>()?;
    ratios
        .iter()
        .map(|&ratio| {
            let mut total = 0.0;
            let mut size = 0.0;
            let mut included = 0;
            for (t, r) in first.iter().zip(&reference) {
                let s = salient_set(t, ratio, false)?;
                if s.is_empty() {
                    continue;
                }
                total += cross_model_transfer(&s, r)?;
                size += s.len() as f64;
                included += 1;
            }
            if included == 0 {
                return Err(Error::Empty("every first-model salient set is empty"));
            }
            Ok(TransferPoint {
                ratio,
                gamma: total / included as f64,
                mean_size: size / included as f64,
                included,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferPoint {
    pub ratio: f64,
    pub gamma: f64,
    pub mean_size: f64,
    pub included: usize,
}

/// Monte Carlo estimate of `γ` for uniformly random concept sets of fixed
/// sizes, drawn from the `2^n − 1` non-empty subsets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RandomBaseline {
    pub mean: f64,
    pub standard_error: f64,
    /// `size2 / (2^n − 1)`.
    pub analytic: f64,
    pub trials: usize,
}

pub fn random_transfer_baseline(
    size1: usize,
    size2: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<RandomBaseline> {
    if n == 0 || n > crate::lattice::MAX_VARIABLES {
        return Err(Error::VariableCount {
            n,
            max: crate::lattice::MAX_VARIABLES,
        });
    }
    let universe = (1usize << n) - 1;
    if size1 > universe || size2 > universe {
        return Err(Error::InvalidParameter(format!(
            "set sizes {size1}, {size2} exceed {universe} concepts"
        )));
    }
    if size1 == 0 {
        return Err(Error::Empty("first random set"));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let analytic = size2 as f64 / universe as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut marks = vec![false; universe];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..trials {
        let second = sample_indices(&mut rng, universe, size2);
        for i in second.iter() {
            marks[i] = true;
        }
        let first = sample_indices(&mut rng, universe, size1);
        let hits = first.iter().filter(|&i| marks[i]).count();
        for i in second.iter() {
            marks[i] = false;
        }
        let gamma = hits as f64 / size1 as f64;
        sum += gamma;
        sum_sq += gamma * gamma;
    }
    let t = trials as f64;
    let mean = sum / t;
    let variance = if trials > 1 {
        ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(RandomBaseline {
        mean,
        standard_error: (variance / t).sqrt(),
        analytic,
        trials,
    })
}

/// Salience sign counts of one concept over a category population.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConceptStats {
    pub concept: VariableSet,
    pub m_plus: usize,
    pub m_minus: usize,
    pub m: usize,
    /// `α = (m⁺ + m⁻) / m`.
    pub alpha: f64,
    /// `β = max(m⁺, m⁻) / (m⁺ + m⁻)`.
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaBucket {
    pub lower: f64,
    pub upper: f64,
    pub concepts: usize,
    pub mean_beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrimination {
    pub ratio: f64,
    pub m: usize,
    /// Every ever-salient concept, ascending by mask.
    pub concepts: Vec<ConceptStats>,
    /// `β̄ = Σ α·β / Σ α`.
    pub beta_bar: f64,
    pub buckets: Vec<AlphaBucket>,
}

/// Discrimination power of every ever-salient concept in one category.
pub fn discrimination_stats(tables: &[InteractionTable], ratio: f64) -> Result<Discrimination> {
    let salient: Vec<SalientSet> = tables
        .iter()
        .map(|t| salient_set(t, ratio, false))
        .collect::<Result<_>>()?;
    discrimination_from_salient(&salient, ratio)
}

pub fn discrimination_from_salient(salient: &[SalientSet], ratio: f64) -> Result<Discrimination> {
    if salient.is_empty() {
        return Err(Error::Empty("population"));
    }
    let m = salient.len();
    let mut signs: BTreeMap<VariableSet, (usize, usize)> = BTreeMap::new();
    for s in salient {
        for (concept, effect) in s.iter() {
            let entry = signs.entry(concept).or_insert((0, 0));
            if effect > 0.0 {
                entry.0 += 1;
            } else if effect < 0.0 {
                entry.1 += 1;
            }
        }
    }
    let concepts: Vec<ConceptStats> = signs
        .into_iter()
        .map(|(concept, (m_plus, m_minus))| {
            let hits = m_plus + m_minus;
            ConceptStats {
                concept,
                m_plus,
                m_minus,
                m,
                alpha: hits as f64 / m as f64,
                beta: m_plus.max(m_minus) as f64 / hits as f64,
            }
        })
        .collect();
    if concepts.is_empty() {
        return Err(Error::Empty("no concept was ever salient"));
    }
    let weight: f64 = concepts.iter().map(|c| c.alpha).sum();
    let beta_bar = concepts.iter().map(|c| c.alpha * c.beta).sum::<f64>() / weight;
    let mut lower = 0.0;
    let buckets = ALPHA_BUCKETS
        .iter()
        .map(|&upper| {
            let inside: Vec<f64> = concepts
                .iter()
                .filter(|c| c.alpha > lower && c.alpha <= upper)
                .map(|c| c.beta)
                .collect();
            let bucket = AlphaBucket {
                lower,
                upper,
                concepts: inside.len(),
                mean_beta: (!inside.is_empty()).then(|| inside.iter().sum::<f64>() / inside.len() as f64),
            };
            lower = upper;
            bucket
        })
        .collect();
    Ok(Discrimination {
        ratio,
        m,
        concepts,
        beta_bar,
        buckets,
    })
}

/// `κ = E_x[Σ_{S∈Ω_x, |S|≥2} |I(S)| / Σ_{S∈Ω_x} |I(S)|]`; samples with no
/// salient mass are skipped.
pub fn multi_variable_strength(salient: &[SalientSet]) -> Result<Expectation> {
    let mut total = 0.0;
    let mut included = 0;
    for s in salient {
        let (multi, all) = s.iter().fold((0.0, 0.0), |(multi, all), (set, e)| {
            let a = e.abs();
            (if set.len() >= 2 { multi + a } else { multi }, all + a)
        });
        if all > 0.0 {
            total += multi / all;
            included += 1;
        }
    }
    if included == 0 {
        return Err(Error::Empty("no sample has salient mass"));
    }
    Ok(Expectation {
        mean: total / included as f64,
        included,
        excluded: salient.len() - included,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Distribution of one concept's effect over the samples where it is salient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EffectHistogram {
    pub concept: VariableSet,
    pub effects: Vec<f64>,
    pub bins: Vec<HistogramBin>,
    pub mean: Option<f64>,
    /// `max(#positive, #negative) / #salient`.
    pub sign_consistency: Option<f64>,
}

impl EffectHistogram {
    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

pub fn effect_histogram(
    concept: VariableSet,
    tables: &[InteractionTable],
    ratio: f64,
    bins: usize,
) -> Result<EffectHistogram> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let mut effects = Vec::new();
    for t in tables {
        if let Some(e) = salient_set(t, ratio, false)?.effect(concept) {
            effects.push(e);
        }
    }
    if effects.is_empty() {
        return Ok(EffectHistogram {
            concept,
            effects,
            bins: Vec::new(),
            mean: None,
            sign_consistency: None,
        });
    }
    let lo = effects.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = effects.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = if lo == hi {
        vec![HistogramBin {
            lower: lo,
            upper: hi,
            count: effects.len(),
        }]
    } else {
        let width = (hi - lo) / bins as f64;
        let mut out: Vec<HistogramBin> = (0..bins)
            .map(|b| HistogramBin {
                lower: lo + b as f64 * width,
                upper: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
                count: 0,
            })
            .collect();
        for &e in &effects {
            let b = (((e - lo) / width) as usize).min(bins - 1);
            out[b].count += 1;
        }
        out
    };
    let positive = effects.iter().filter(|&&e| e > 0.0).count();
    let negative = effects.iter().filter(|&&e| e < 0.0).count();
    let mean = effects.iter().sum::<f64>() / effects.len() as f64;
    Ok(EffectHistogram {
        concept,
        sign_consistency: Some(positive.max(negative) as f64 / effects.len() as f64),
        mean: Some(mean),
        effects,
        bins,
    })
}

/// `Σ_{|S|=s} |I'(S) − I(S)| / Σ_{|S|=s} |I(S)|` for one table pair.
pub fn order_sensitivity(clean: &InteractionTable, perturbed: &InteractionTable, order: usize) -> Result<f64> {
    if clean.n() != perturbed.n() {
        return Err(Error::DimensionMismatch {
            expected: clean.n(),
            actual: perturbed.n(),
        });
    }
    if order == 0 || order > clean.n() {
        return Err(Error::InvalidParameter(format!(
            "order must lie in 1..={}, got {order}",
            clean.n()
        )));
    }
    let (mut change, mut mass) = (0.0, 0.0);
    for ((set, a), b) in clean.iter().zip(perturbed.effects()) {
        if set.len() == order {
            change += (b - a).abs();
            mass += a.abs();
        }
    }
    if mass == 0.0 {
        return Err(Error::InvalidParameter(format!("order-{order} effect mass is zero")));
    }
    Ok(change / mass)
}
