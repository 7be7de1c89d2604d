mod common;

use common::{brute_force_shapley, brute_force_sii, random_values, relative_gap};
use harsanyi::indices::{
    shapley_from_dividends, shapley_interaction_index, shapley_permutation_oracle, shapley_taylor_index,
};
use harsanyi::lattice::{harsanyi_transform, ValueProfile, VariableSet};
use harsanyi::value::{make_additive_game, make_interaction_game};
use proptest::prelude::*;

fn profile(v: Vec<f64>) -> ValueProfile {
    ValueProfile::from_values(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dividend_shapley_matches_permutations(v in (1usize..=8).prop_flat_map(|n| prop::collection::vec(-5.0..5.0f64, 1usize << n))) {
        let p = profile(v.clone());
        let n = p.n();
        let fast = shapley_from_dividends(&harsanyi_transform(&p));
        let oracle = shapley_permutation_oracle(&p).unwrap();
        prop_assert!(relative_gap(&fast.values, &oracle.values) <= 1e-9);
        prop_assert!(relative_gap(&fast.values, &brute_force_shapley(&v, n)) <= 1e-9);
        let gain = p.full_value() - p.empty_value();
        prop_assert!((fast.sum() - gain).abs() <= 1e-9 * gain.abs().max(1.0));
    }

    #[test]
    fn singleton_interaction_index_is_shapley(v in (1usize..=7).prop_flat_map(|n| prop::collection::vec(-5.0..5.0f64, 1usize << n))) {
        let p = profile(v);
        let t = harsanyi_transform(&p);
        let phi = shapley_from_dividends(&t);
        for i in 0..p.n() {
            let sii = shapley_interaction_index(&t, VariableSet::singleton(i, p.n()).unwrap()).unwrap();
            prop_assert!((sii - phi.values[i]).abs() <= 1e-9);
        }
    }
}

#[test]
fn interaction_index_matches_discrete_derivatives() {
    for seed in 0..5 {
        let v = random_values(seed, 5, 3.0);
        let t = harsanyi_transform(&profile(v.clone()));
        for mask in 1u32..32 {
            let got = shapley_interaction_index(&t, VariableSet::new(mask, 5).unwrap()).unwrap();
            let want = brute_force_sii(&v, 5, mask as usize);
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "mask {mask}: {got} vs {want}");
        }
    }
}

#[test]
fn interaction_index_of_constructed_games() {
    let t0 = VariableSet::from_indices(&[1, 3], 5).unwrap();
    let game = make_interaction_game(t0, 2.5, 5).unwrap();
    let t = harsanyi_transform(&game.profile().unwrap());
    assert!((shapley_interaction_index(&t, t0).unwrap() - 2.5).abs() < 1e-12);

    let additive = make_additive_game(&[1.0, 2.0, -1.0, 0.5]).unwrap();
    let t = harsanyi_transform(&additive.profile().unwrap());
    for mask in 1u32..16 {
        let s = VariableSet::new(mask, 4).unwrap();
        if s.len() >= 2 {
            assert!(shapley_interaction_index(&t, s).unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn shapley_taylor_is_efficient() {
    for seed in 0..5 {
        let v = random_values(100 + seed, 4, 2.0);
        let p = profile(v);
        let t = harsanyi_transform(&p);
        for k in 1..=4 {
            let mut total = 0.0;
            for mask in 1u32..16 {
                let s = VariableSet::new(mask, 4).unwrap();
                if s.len() <= k {
                    total += shapley_taylor_index(&t, s, k).unwrap();
                }
            }
            let gain = p.full_value() - p.empty_value();
            assert!((total - gain).abs() <= 1e-9 * gain.abs().max(1.0), "k = {k}");
        }
    }
}

#[test]
fn shapley_taylor_branches() {
    let p = profile(random_values(7, 4, 1.0));
    let t = harsanyi_transform(&p);
    let low = VariableSet::from_indices(&[2], 4).unwrap();
    let high = VariableSet::from_indices(&[0, 1, 2], 4).unwrap();
    assert_eq!(shapley_taylor_index(&t, low, 2).unwrap(), t.get(low));
    assert_eq!(shapley_taylor_index(&t, high, 2).unwrap(), 0.0);
    assert!(shapley_taylor_index(&t, low, 0).is_err());
    assert!(shapley_taylor_index(&t, low, 5).is_err());
}

#[test]
fn dummy_and_symmetric_players() {
    // v = 3·[{0,1} ⊆ S] + 0.7·[2 ∈ S]: 0 and 1 symmetric, 2 a dummy.
    let pair = make_interaction_game(VariableSet::from_indices(&[0, 1], 3).unwrap(), 3.0, 3).unwrap();
    let game = pair.plus(&make_additive_game(&[0.0, 0.0, 0.7]).unwrap()).unwrap();
    let p = game.profile().unwrap();
    let phi = shapley_from_dividends(&harsanyi_transform(&p));
    assert!((phi.values[0] - phi.values[1]).abs() < 1e-12);
    assert!((phi.values[2] - 0.7).abs() < 1e-12);
    assert!(shapley_permutation_oracle(&profile(vec![0.0; 1 << 11])).is_err());
}
