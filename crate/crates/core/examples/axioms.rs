// The dividend axioms checked on constructed and random games.

use harsanyi::axioms::{
    anonymity_error, distribution_error, dummy_error, efficiency_error, linearity_error, recursive_error,
    run_synthetic_suite,
};
use harsanyi::lattice::VariableSet;
use harsanyi::value::{make_additive_game, make_random_game};

fn main() -> harsanyi::Result<()> {
    let p = make_random_game(1, 6, 2.0)?.profile()?;
    let q = make_random_game(2, 6, 2.0)?.profile()?;
    println!("efficiency  {:e}", efficiency_error(&p));
    println!("linearity   {:e}", linearity_error(&p, &q)?);
    println!("anonymity   {:e}", anonymity_error(&p, &[5, 3, 1, 0, 2, 4])?);
    println!("recursive   {:e}", recursive_error(&p));
    let additive = make_additive_game(&[1.0, -2.0, 0.5])?.profile()?;
    println!("dummy       {:e}", dummy_error(&additive, 1)?);
    println!("distribution {:e}", distribution_error(VariableSet::from_indices(&[0, 2], 3)?, 4.0)?);

    let report = run_synthetic_suite(17, 8, 3)?;
    for c in &report.checks {
        println!("{:<28} {} over {} games", c.name, if c.passed { "ok" } else { "FAILED" }, c.games);
    }
    Ok(())
}
