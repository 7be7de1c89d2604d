// Transferability of salient concepts between two independently trained
// MLP-5 networks, against randomly drawn concept sets.

use harsanyi::analytics::random_transfer_baseline;
use harsanyi::config::RunConfig;
use harsanyi::mlp::train_mlp;
use harsanyi::pipeline::{analyze_models, load_dataset};

fn main() -> harsanyi::Result<()> {
    let config = RunConfig::default();
    let ds = load_dataset(&config)?;
    let arch = config.model.architecture;
    let (first, _) = train_mlp(&ds, arch, &config.training, config.model.seed)?;
    let (second, _) = train_mlp(&ds, arch, &config.training, config.model.second_seed)?;

    let report = analyze_models(&config, &ds, &first, Some(&second))?;
    let g = report.blocks.gamma_curve.as_ref().expect("gamma");
    println!("ratio  gamma  |omega|  random");
    for (p, r) in g.points.iter().zip(&g.random) {
        println!("{:.2}   {:.3}  {:>6.1}  {:.3}", p.ratio, p.gamma, p.mean_size, r.baseline.mean);
    }

    let r = random_transfer_baseline(20, 20, 9, 10_000, 1)?;
    println!(
        "random sets of 20 among 511 concepts: {:.4} ± {:.4} (expected {:.4})",
        r.mean, r.standard_error, r.analytic
    );
    Ok(())
}
