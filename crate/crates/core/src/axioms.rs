//! Checks of the dividend axioms on value profiles, and the synthetic game
//! suite run by `synth-check`.
//!
//! Every check returns the largest deviation from the stated identity,
//! relative to `max(1, largest |value| involved)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indices::{shapley_from_dividends, shapley_permutation_oracle, ORACLE_MAX_VARIABLES};
use crate::lattice::{harsanyi_transform, ValueProfile, VariableSet, EXACT_TOLERANCE};
use crate::value::{make_additive_game, make_interaction_game, make_random_game};

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    let s = scale(a).max(scale(b));
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / s
}

/// `Σ_S I(S) = v(N)`.
pub fn efficiency_error(profile: &ValueProfile) -> f64 {
    let table = harsanyi_transform(profile);
    (table.total() - profile.full_value()).abs() / profile.full_value().abs().max(1.0)
}

/// Transform of `p + q` against the sum of the transforms.
pub fn linearity_error(p: &ValueProfile, q: &ValueProfile) -> Result<f64> {
    let joint = harsanyi_transform(&p.add(q)?);
    let (tp, tq) = (harsanyi_transform(p), harsanyi_transform(q));
    let sum: Vec<f64> = tp.effects().iter().zip(tq.effects()).map(|(a, b)| a + b).collect();
    Ok(max_gap(joint.effects(), &sum))
}

fn check_variable(n: usize, i: usize) -> Result<()> {
    if i >= n {
        return Err(Error::InvalidParameter(format!("variable {i} out of range for n = {n}")));
    }
    Ok(())
}

/// Whether `i` adds a constant to every coalition it joins.
pub fn is_dummy(profile: &ValueProfile, i: usize) -> Result<bool> {
    check_variable(profile.n(), i)?;
    let v = profile.values();
    let bit = 1usize << i;
    let gain = v[bit] - v[0];
    let tol = EXACT_TOLERANCE * scale(v);
    Ok((0..v.len()).filter(|s| s & bit == 0).all(|s| (v[s | bit] - v[s] - gain).abs() <= tol))
}

/// Largest `|I(T ∪ {i})|` over non-empty `T ∌ i`.
pub fn dummy_error(profile: &ValueProfile, i: usize) -> Result<f64> {
    check_variable(profile.n(), i)?;
    let table = harsanyi_transform(profile);
    let bit = 1usize << i;
    let e = table.effects();
    let worst = (1..e.len()).filter(|s| s & bit == 0).fold(0.0_f64, |m, s| m.max(e[s | bit].abs()));
    Ok(worst / scale(profile.values()))
}

/// Whether swapping `i` and `j` leaves the profile unchanged.
pub fn is_symmetric_pair(profile: &ValueProfile, i: usize, j: usize) -> Result<bool> {
    let swapped = profile.permute(&transposition(profile.n(), i, j)?)?;
    Ok(max_gap(profile.values(), swapped.values()) <= EXACT_TOLERANCE)
}

/// Largest `|I(S ∪ {i}) − I(S ∪ {j})|` over `S` disjoint from `{i, j}`.
pub fn symmetry_error(profile: &ValueProfile, i: usize, j: usize) -> Result<f64> {
    transposition(profile.n(), i, j)?;
    let table = harsanyi_transform(profile);
    let (bi, bj) = (1usize << i, 1usize << j);
    let e = table.effects();
    let worst = (0..e.len())
        .filter(|s| s & (bi | bj) == 0)
        .fold(0.0_f64, |m, s| m.max((e[s | bi] - e[s | bj]).abs()));
    Ok(worst / scale(e))
}

fn transposition(n: usize, i: usize, j: usize) -> Result<Vec<usize>> {
    check_variable(n, i)?;
    check_variable(n, j)?;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(i, j);
    Ok(perm)
}

/// Transform of a relabelled profile against the relabelled transform.
pub fn anonymity_error(profile: &ValueProfile, perm: &[usize]) -> Result<f64> {
    let a = harsanyi_transform(&profile.permute(perm)?);
    let b = harsanyi_transform(profile).permute(perm)?;
    Ok(max_gap(a.effects(), b.effects()))
}

/// `I(S ∪ {i}) = Σ_{L ⊆ S} (−1)^{|S|−|L|} v(L ∪ {i}) − I(S)` for all `S ∌ i`.
pub fn recursive_error(profile: &ValueProfile) -> f64 {
    let n = profile.n();
    let v = profile.values();
    let table = harsanyi_transform(profile);
    let e = table.effects();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let bit = 1usize << i;
        for s in (0..v.len()).filter(|s| s & bit == 0) {
            let size = s.count_ones() as usize;
            let mut total = 0.0;
            for l in VariableSet::from_raw(s, n).subsets() {
                let sign = if (size - l.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
                total += sign * v[l.index() | bit];
            }
            worst = worst.max((e[s | bit] - (total - e[s])).abs());
        }
    }
    worst / scale(v).max(scale(e))
}

/// The game `v(S) = c·[T ⊆ S]` has a single dividend `c` at `T`.
pub fn distribution_error(coalition: VariableSet, c: f64) -> Result<f64> {
    let game = make_interaction_game(coalition, c, coalition.n())?;
    let table = harsanyi_transform(&game.profile()?);
    let worst = table.iter().fold(0.0_f64, |m, (s, e)| {
        let expected = if s == coalition { c } else { 0.0 };
        m.max((e - expected).abs())
    });
    Ok(worst / c.abs().max(1.0))
}

/// Dividend-based Shapley values against full permutation enumeration.
pub fn shapley_oracle_error(profile: &ValueProfile) -> Result<f64> {
    let fast = shapley_from_dividends(&harsanyi_transform(profile));
    let slow = shapley_permutation_oracle(profile)?;
    Ok(max_gap(&fast.values, &slow.values))
}

/// Outcome of one axiom over a family of games.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub games: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthReport {
    pub seed: u64,
    pub max_n: usize,
    pub games_per_size: usize,
    pub checks: Vec<AxiomCheck>,
}

impl SynthReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tally {
    name: &'static str,
    games: usize,
    max_error: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            games: 0,
            max_error: 0.0,
        }
    }

    fn record(&mut self, error: f64) {
        self.games += 1;
        // NaN must fail the check.
        if error.is_nan() || error > self.max_error {
            self.max_error = if error.is_nan() { f64::INFINITY } else { error };
        }
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            name: self.name.into(),
            games: self.games,
            max_error: self.max_error,
            tolerance: EXACT_TOLERANCE,
            passed: self.max_error <= EXACT_TOLERANCE,
        }
    }
}

/// Random game with variable `i` made a dummy: `v(S) = q(S ∖ {i}) + w·[i ∈ S]`.
fn with_dummy(base: &ValueProfile, i: usize, w: f64) -> Result<ValueProfile> {
    let bit = 1usize << i;
    let v = base.values();
    ValueProfile::from_values((0..v.len()).map(|s| v[s & !bit] + if s & bit != 0 { w } else { 0.0 }).collect())
}

/// Random game averaged with its `i ↔ j` relabelling.
fn symmetrized(base: &ValueProfile, i: usize, j: usize) -> Result<ValueProfile> {
    let swapped = base.permute(&transposition(base.n(), i, j)?)?;
    base.add(&swapped)?.scale(0.5)
}

/// Runs every axiom on constructed and seeded random games with
/// `1 ≤ n ≤ max_n` (`max_n ≤ 10`); the permutation oracle covers `n ≤ 8`.
pub fn run_synthetic_suite(seed: u64, max_n: usize, games_per_size: usize) -> Result<SynthReport> {
    if max_n == 0 || max_n > ORACLE_MAX_VARIABLES {
        return Err(Error::VariableCount {
            n: max_n,
            max: ORACLE_MAX_VARIABLES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut efficiency = Tally::new("efficiency");
    let mut linearity = Tally::new("linearity");
    let mut dummy = Tally::new("dummy");
    let mut symmetry = Tally::new("symmetry");
    let mut anonymity = Tally::new("anonymity");
    let mut recursive = Tally::new("recursive");
    let mut distribution = Tally::new("interaction-distribution");
    let mut shapley = Tally::new("shapley-permutation-oracle");

    for n in 1..=max_n {
        for _ in 0..games_per_size {
            let amplitude = rng.random_range(0.1..10.0);
            let p = make_random_game(rng.random(), n, amplitude)?.profile()?;
            let q = make_random_game(rng.random(), n, amplitude)?.profile()?;
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let additive = make_additive_game(&weights)?.profile()?;

            efficiency.record(efficiency_error(&p));
            efficiency.record(efficiency_error(&additive));
            linearity.record(linearity_error(&p, &q)?);
            recursive.record(recursive_error(&p));

            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            anonymity.record(anonymity_error(&p, &perm)?);

            let i = rng.random_range(0..n);
            let w = rng.random_range(-2.0..2.0);
            dummy.record(dummy_error(&with_dummy(&p, i, w)?, i)?);
            for k in 0..n {
                dummy.record(dummy_error(&additive, k)?);
            }

            if n >= 2 {
                let j = (i + 1 + rng.random_range(0..n - 1)) % n;
                symmetry.record(symmetry_error(&symmetrized(&p, i, j)?, i, j)?);
            }

            let bits = rng.random_range(1..1u32 << n);
            distribution.record(distribution_error(VariableSet::new(bits, n)?, rng.random_range(-5.0..5.0))?);

            if n <= 8 {
                shapley.record(shapley_oracle_error(&p)?);
                shapley.record(shapley_oracle_error(&additive)?);
            }
        }
    }
    let checks = [efficiency, linearity, dummy, symmetry, anonymity, recursive, distribution, shapley]
        .into_iter()
        .map(Tally::finish)
        .collect();
    Ok(SynthReport {
        seed,
        max_n,
        games_per_size,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_games() {
        let report = run_synthetic_suite(3, 6, 3).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn constructed_games_meet_preconditions() {
        let p = make_random_game(1, 5, 1.0).unwrap().profile().unwrap();
        assert!(is_dummy(&with_dummy(&p, 2, 0.7).unwrap(), 2).unwrap());
        assert!(!is_dummy(&p, 2).unwrap());
        assert!(is_symmetric_pair(&symmetrized(&p, 0, 3).unwrap(), 0, 3).unwrap());
    }

    #[test]
    fn checks_detect_violations() {
        let p = make_random_game(9, 4, 1.0).unwrap().profile().unwrap();
        assert!(dummy_error(&p, 1).unwrap() > 1e-3);
        assert!(symmetry_error(&p, 0, 1).unwrap() > 1e-3);
    }
}
