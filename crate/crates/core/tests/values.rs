use harsanyi::lattice::{harsanyi_transform, VariableSet};
use harsanyi::value::{
    context_averaged_profile, logit_value, make_additive_game, make_interaction_game, make_random_game, mask_sample,
    BaselinePolicy, ContextSpec, ValueFunctionSpec,
};
use harsanyi::Error;

#[test]
fn masking_keeps_selected_variables() {
    let keep = VariableSet::from_indices(&[0, 2], 3).unwrap();
    let b = BaselinePolicy::Explicit { vector: vec![9.0, 8.0, 7.0] };
    assert_eq!(mask_sample(&[1.0, 2.0, 3.0], keep, &b).unwrap(), vec![1.0, 8.0, 3.0]);
    let mean = BaselinePolicy::per_variable_mean(&[vec![0.0, 2.0], vec![2.0, 4.0]]).unwrap();
    let full = VariableSet::empty(2).unwrap();
    assert_eq!(mask_sample(&[5.0, 5.0], full, &mean).unwrap(), vec![1.0, 3.0]);
    let short = BaselinePolicy::Explicit { vector: vec![0.0] };
    assert!(matches!(mask_sample(&[1.0, 2.0], full, &short), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn logit_matches_closed_form() {
    let v = logit_value(&[0.2, 0.5, 0.3], 1).unwrap();
    assert!((v - 0.0).abs() < 1e-12);
    let v = logit_value(&[0.9, 0.1], 0).unwrap();
    assert!((v - 9.0f64.ln()).abs() < 1e-12);
    let saturated = logit_value(&[1.0, 0.0], 0).unwrap();
    assert!((saturated - ((1.0 - 1e-12) / 1e-12f64).ln()).abs() < 1e-6);
    assert!(logit_value(&[0.5, 0.5], 2).is_err());
    assert!(logit_value(&[0.5, 0.6], 0).is_err());
}

#[test]
fn synthetic_games_have_known_dividends() {
    let t0 = VariableSet::from_indices(&[0, 2, 3], 5).unwrap();
    let table = harsanyi_transform(&make_interaction_game(t0, -1.25, 5).unwrap().profile().unwrap());
    for (s, e) in table.iter() {
        assert_eq!(e, if s == t0 { -1.25 } else { 0.0 });
    }

    let w = [0.5, -1.0, 2.0];
    let table = harsanyi_transform(&make_additive_game(&w).unwrap().profile().unwrap());
    for (s, e) in table.iter() {
        let expected = if s.len() == 1 { w[s.indices().next().unwrap()] } else { 0.0 };
        assert!((e - expected).abs() < 1e-12);
    }

    let a = make_random_game(4, 6, 1.0).unwrap().profile().unwrap();
    let b = make_random_game(4, 6, 1.0).unwrap().profile().unwrap();
    assert_eq!(a, b);
    assert!(a.values().iter().all(|v| v.abs() <= 1.0));
}

#[test]
fn context_averaging_is_linear_in_strength() {
    // f = x0·x1·x2 with x2 as context fading from 0 to 1: average factor 1/2.
    let f = ValueFunctionSpec::new("product", true, |x: &[f64]| x[0] * x[1] * x[2]);
    let analyzed = VariableSet::from_indices(&[0, 1], 3).unwrap();
    let ctx = ContextSpec::new(analyzed.complement());
    let p = context_averaged_profile(&f, &[2.0, 3.0, 1.0], analyzed, &ctx, &BaselinePolicy::Zeros).unwrap();
    let t = harsanyi_transform(&p);
    assert!((t.get(VariableSet::full(2).unwrap()) - 3.0).abs() < 1e-12);
    assert!(t.get(VariableSet::singleton(0, 2).unwrap()).abs() < 1e-12);
}
