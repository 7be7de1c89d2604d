// Dividends among analyzed variables with the remaining context variables
// faded between the baseline and the sample.

use harsanyi::lattice::{harsanyi_transform, VariableSet};
use harsanyi::value::{context_averaged_profile, BaselinePolicy, ContextSpec, ValueFunctionSpec};

fn main() -> harsanyi::Result<()> {
    // x0·x1 + x0·x2, with x2 treated as context.
    let f = ValueFunctionSpec::new("x0*x1 + x0*x2", true, |x: &[f64]| x[0] * x[1] + x[0] * x[2]);
    let sample = [1.0, 2.0, 3.0];
    let analyzed = VariableSet::from_indices(&[0, 1], 3)?;
    let ctx = ContextSpec::new(analyzed.complement());

    let profile = context_averaged_profile(&f, &sample, analyzed, &ctx, &BaselinePolicy::Zeros)?;
    let table = harsanyi_transform(&profile);
    for (s, e) in table.iter() {
        println!("I({s}) = {e:.4}");
    }
    // The x0·x2 term shows up on x0 alone, scaled by the mean context strength.
    Ok(())
}
