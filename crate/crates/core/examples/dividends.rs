// Dividends of a small synthetic game: transform, efficiency, salient
// concepts and the binary/CSV table formats.

use harsanyi::lattice::{
    efficiency_residual, harsanyi_transform, reconstruct_value, salient_set, InteractionTable, VariableSet,
};
use harsanyi::value::{make_additive_game, make_interaction_game};

fn main() -> harsanyi::Result<()> {
    // v(S) = 2·[{1,2} ⊆ S] − 1.5·[{2,3,4} ⊆ S] + additive terms
    let pair = make_interaction_game(VariableSet::from_indices(&[0, 1], 4)?, 2.0, 4)?;
    let triple = make_interaction_game(VariableSet::from_indices(&[1, 2, 3], 4)?, -1.5, 4)?;
    let additive = make_additive_game(&[0.3, -0.2, 0.1, 0.05])?;
    let game = pair.plus(&triple)?.plus(&additive)?;

    let profile = game.profile()?;
    let table = harsanyi_transform(&profile);
    println!("nonzero dividends:");
    for (s, e) in table.iter().filter(|(_, e)| e.abs() > 1e-12) {
        println!("  I({s}) = {e:+.3}");
    }
    println!("v(N) = {:.3}, sum of dividends = {:.3}", profile.full_value(), table.total());
    println!("efficiency residual = {:e}", efficiency_residual(&profile, &table)?);

    let s = VariableSet::from_indices(&[0, 1, 3], 4)?;
    println!("v({s}) = {:.3} rebuilt as {:.3}", profile.get(s), reconstruct_value(&table, s));

    let salient = salient_set(&table, 0.2, false)?;
    println!("salient at 0.2·max|I|: {:?}", salient.members().map(|m| m.to_string()).collect::<Vec<_>>());

    let mut bytes = Vec::new();
    table.write_binary(&mut bytes)?;
    let back = InteractionTable::read_binary(bytes.as_slice())?;
    assert_eq!(back, table);
    println!("binary table: {} bytes", bytes.len());

    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv).expect("utf-8").lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
