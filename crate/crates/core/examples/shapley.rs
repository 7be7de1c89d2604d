// Shapley values, the Shapley interaction index and the Shapley-Taylor
// index, all read off the dividend table.

use harsanyi::indices::{
    shapley_from_dividends, shapley_interaction_index, shapley_permutation_oracle, shapley_taylor_index,
};
use harsanyi::lattice::{harsanyi_transform, VariableSet};
use harsanyi::value::make_random_game;

fn main() -> harsanyi::Result<()> {
    let n = 5;
    let profile = make_random_game(3, n, 1.0)?.profile()?;
    let table = harsanyi_transform(&profile);

    let fast = shapley_from_dividends(&table);
    let slow = shapley_permutation_oracle(&profile)?;
    for i in 0..n {
        println!("phi({}) = {:+.6}   permutations: {:+.6}", i + 1, fast.values[i], slow.values[i]);
    }
    println!(
        "sum phi = {:.6}, v(N) - v(empty) = {:.6}",
        fast.sum(),
        profile.full_value() - profile.empty_value()
    );

    let t = VariableSet::from_indices(&[0, 2], n)?;
    println!("Shapley interaction of {t}: {:+.6}", shapley_interaction_index(&table, t)?);

    let k = 2;
    let mut total = 0.0;
    for (s, _) in table.iter().filter(|(s, _)| !s.is_empty() && s.len() <= k) {
        total += shapley_taylor_index(&table, s, k)?;
    }
    println!("order-{k} Shapley-Taylor indices sum to {total:.6}");
    Ok(())
}
