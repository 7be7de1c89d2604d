use harsanyi::analytics::{
    build_dictionary, cross_model_transfer, discrimination_stats, effect_histogram, explanation_ratio,
    explanation_ratio_curve, multi_variable_strength, order_sensitivity, random_transfer_baseline,
};
use harsanyi::lattice::{harsanyi_transform, salient_set, InteractionTable, SalientSet, VariableSet};
use harsanyi::value::make_additive_game;
use proptest::prelude::*;

fn tables(n: usize, count: usize) -> impl Strategy<Value = Vec<InteractionTable>> {
    prop::collection::vec(
        prop::collection::vec(-10.0..10.0f64, 1usize << n).prop_map(|e| InteractionTable::from_effects(e).unwrap()),
        count,
    )
}

fn salient(ts: &[InteractionTable], ratio: f64) -> Vec<SalientSet> {
    ts.iter().map(|t| salient_set(t, ratio, false).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn explanation_ratio_grows_to_one(ts in tables(5, 6), ratio in 0.05..0.6f64) {
        let sets = salient(&ts, ratio);
        let ks: Vec<usize> = (1..=31).collect();
        let curve = explanation_ratio_curve(&sets, &ks).unwrap();
        for w in curve.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        let everything = build_dictionary(&sets, 31).unwrap();
        prop_assert!((explanation_ratio(&everything, &sets).unwrap().mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transferability_bounds(ts in tables(5, 2), a in 0.05..0.9f64, b in 0.05..0.9f64) {
        let (s1, s2) = (salient_set(&ts[0], a, false).unwrap(), salient_set(&ts[1], b, false).unwrap());
        let g = cross_model_transfer(&s1, &s2).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert_eq!(cross_model_transfer(&s1, &s1).unwrap(), 1.0);
        // A lower second threshold only grows the second set.
        let wider = salient_set(&ts[1], b / 2.0, false).unwrap();
        prop_assert!(cross_model_transfer(&s1, &wider).unwrap() >= g);
    }

    #[test]
    fn discrimination_is_a_convex_combination(ts in tables(4, 8), ratio in 0.05..0.5f64) {
        let d = discrimination_stats(&ts, ratio).unwrap();
        for c in &d.concepts {
            prop_assert!(c.m_plus + c.m_minus <= c.m);
            prop_assert!((0.5..=1.0).contains(&c.beta));
        }
        let lo = d.concepts.iter().map(|c| c.beta).fold(1.0, f64::min);
        prop_assert!(d.beta_bar >= lo - 1e-12 && d.beta_bar <= 1.0 + 1e-12);
    }

    #[test]
    fn kappa_is_a_fraction(ts in tables(5, 4), ratio in 0.05..0.5f64) {
        let k = multi_variable_strength(&salient(&ts, ratio)).unwrap();
        prop_assert!((0.0..=1.0).contains(&k.mean));
    }

    #[test]
    fn sensitivity_vanishes_on_identical_tables(ts in tables(5, 1), order in 1usize..=5) {
        prop_assert_eq!(order_sensitivity(&ts[0], &ts[0], order).unwrap(), 0.0);
    }
}

fn table_with(n: usize, entries: &[(usize, f64)]) -> InteractionTable {
    let mut e = vec![0.0; 1 << n];
    for &(m, v) in entries {
        e[m] = v;
    }
    InteractionTable::from_effects(e).unwrap()
}

#[test]
fn dictionary_examples() {
    // Identical salient sets of size five.
    let t = table_with(4, &[(1, 1.0), (3, 1.0), (5, -1.0), (6, 1.0), (15, 1.0)]);
    let sets = salient(&[t.clone(), t.clone(), t], 0.5);
    let d = build_dictionary(&sets, 5).unwrap();
    assert_eq!(d.entries.iter().map(|s| s.index()).collect::<Vec<_>>(), vec![1, 3, 5, 6, 15]);
    assert!(d.frequency.iter().all(|&f| f == 1.0));

    // Disjoint sets of three.
    let a = table_with(4, &[(1, 1.0), (2, 1.0), (3, 1.0)]);
    let b = table_with(4, &[(4, 1.0), (8, 1.0), (12, 1.0)]);
    let d = build_dictionary(&salient(&[a, b], 0.5), 6).unwrap();
    assert_eq!(d.k(), 6);
    assert!(d.frequency.iter().all(|&f| f == 0.5));
    let short = build_dictionary(&salient(&[table_with(4, &[(1, 1.0)])], 0.5), 3).unwrap();
    assert_eq!((short.k(), short.shortfall), (1, 2));
}

#[test]
fn ratio_and_transfer_examples() {
    let sample = table_with(3, &[(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)]);
    let sets = salient(&[sample], 0.5);
    let other = table_with(3, &[(1, 1.0), (2, 1.0), (3, 1.0), (7, 1.0)]);
    let dict = build_dictionary(&salient(std::slice::from_ref(&other), 0.5), 3).unwrap();
    assert_eq!(explanation_ratio(&dict, &sets).unwrap().mean, 0.75);

    let half = table_with(3, &[(1, 1.0), (2, 1.0), (5, 1.0), (6, 1.0)]);
    let g = cross_model_transfer(&sets[0], &salient_set(&half, 0.5, false).unwrap()).unwrap();
    assert_eq!(g, 0.5);
}

#[test]
fn random_baseline_examples() {
    let r = random_transfer_baseline(20, 20, 9, 10_000, 3).unwrap();
    assert!((r.analytic - 20.0 / 511.0).abs() < 1e-15);
    assert!((r.mean - r.analytic).abs() <= 3.0 * r.standard_error);
    assert!(r.mean < 0.05);
    assert_eq!(random_transfer_baseline(5, 31, 5, 100, 1).unwrap().mean, 1.0);
    assert_eq!(random_transfer_baseline(5, 0, 5, 100, 1).unwrap().mean, 0.0);
}

#[test]
fn discrimination_example() {
    // Concept {1,2} salient-positive in 8 of 20 samples, negative in 2.
    let mut ts = Vec::new();
    for i in 0..20 {
        let effect = match i {
            0..=7 => 1.0,
            8 | 9 => -1.0,
            _ => 0.0,
        };
        ts.push(table_with(2, &[(1, 0.9), (3, effect)]));
    }
    let d = discrimination_stats(&ts, 0.5).unwrap();
    let c = d.concepts.iter().find(|c| c.concept.index() == 3).unwrap();
    assert_eq!((c.m_plus, c.m_minus, c.m), (8, 2, 20));
    assert!((c.alpha - 0.5).abs() < 1e-12 && (c.beta - 0.8).abs() < 1e-12);

    let h = effect_histogram(c.concept, &ts, 0.5, 4).unwrap();
    assert!((h.sign_consistency.unwrap() - c.beta).abs() < 1e-12);
}

#[test]
fn kappa_examples() {
    let t = table_with(2, &[(1, 2.0), (2, 1.0), (3, 1.0)]);
    assert!((multi_variable_strength(&salient(&[t], 0.1)).unwrap().mean - 0.25).abs() < 1e-12);
    let game = make_additive_game(&[1.0, -0.5, 2.0, 0.3]).unwrap();
    let t = harsanyi_transform(&game.profile().unwrap());
    assert!(multi_variable_strength(&salient(&[t], 0.01)).unwrap().mean < 1e-9);
}

#[test]
fn histogram_of_constant_effect() {
    let c = VariableSet::from_indices(&[0, 1], 2).unwrap();
    let ts: Vec<_> = (0..5).map(|_| table_with(2, &[(3, 1.5)])).collect();
    let h = effect_histogram(c, &ts, 0.5, 10).unwrap();
    assert_eq!(h.bins.iter().filter(|b| b.count > 0).count(), 1);
    assert_eq!(h.mean, Some(1.5));
    let never = VariableSet::from_indices(&[0], 2).unwrap();
    assert!(effect_histogram(never, &ts, 0.5, 10).unwrap().is_empty());
}

#[test]
fn sensitivity_of_shifted_order() {
    let clean = table_with(3, &[(3, 2.0), (5, -1.0), (6, 1.0), (1, 4.0)]);
    let mut shifted = clean.effects().to_vec();
    for (m, e) in shifted.iter_mut().enumerate() {
        if (m as u32).count_ones() == 2 {
            *e += 1.0;
        }
    }
    let perturbed = InteractionTable::from_effects(shifted).unwrap();
    assert!((order_sensitivity(&clean, &perturbed, 2).unwrap() - 3.0 / 4.0).abs() < 1e-12);
}
