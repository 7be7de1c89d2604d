#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct inclusion-exclusion: `I(S) = Σ_{T ⊆ S} (−1)^{|S|−|T|} v(T)`.
pub fn naive_dividends(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|s| {
            let mut total = 0.0;
            let mut t = s;
            loop {
                let sign = if (s.count_ones() - t.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * v[t];
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
            total
        })
        .collect()
}

/// `v(S) = Σ_{T ⊆ S} I(T)` by brute force.
pub fn naive_values(effects: &[f64]) -> Vec<f64> {
    (0..effects.len())
        .map(|s| (0..effects.len()).filter(|t| t & s == *t).map(|t| effects[t]).sum())
        .collect()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Shapley interaction index from its textbook definition: weighted
/// discrete derivatives `Δ_T v(S) = Σ_{L ⊆ T} (−1)^{|T|−|L|} v(S ∪ L)` over
/// `S ⊆ N ∖ T`, weights `(n−|S|−|T|)! |S|! / (n−|T|+1)!`.
pub fn brute_force_sii(v: &[f64], n: usize, t: usize) -> f64 {
    let tn = t.count_ones() as usize;
    let mut total = 0.0;
    for s in 0..v.len() {
        if s & t != 0 {
            continue;
        }
        let sn = s.count_ones() as usize;
        let weight = factorial(n - sn - tn) * factorial(sn) / factorial(n - tn + 1);
        let mut derivative = 0.0;
        for l in 0..v.len() {
            if l & t == l {
                let sign = if (tn - l.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
                derivative += sign * v[s | l];
            }
        }
        total += weight * derivative;
    }
    total
}

/// Shapley values as marginal contributions weighted by `|S|!(n−|S|−1)!/n!`.
pub fn brute_force_shapley(v: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let bit = 1 << i;
            (0..v.len())
                .filter(|s| s & bit == 0)
                .map(|s| {
                    let k = s.count_ones() as usize;
                    factorial(k) * factorial(n - k - 1) / factorial(n) * (v[s | bit] - v[s])
                })
                .sum()
        })
        .collect()
}

pub fn random_values(seed: u64, n: usize, amplitude: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1usize << n).map(|_| rng.random_range(-amplitude..=amplitude)).collect()
}

/// `max |a − b| / max(1, max |a|, max |b|)`.
pub fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().chain(b).fold(1.0_f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
