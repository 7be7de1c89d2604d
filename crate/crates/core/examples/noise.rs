// Concept quality of MLP-5 trained on wifi data with noisy labels and
// noisy inputs.

use harsanyi::config::RunConfig;
use harsanyi::pipeline::noise_study;

fn main() -> harsanyi::Result<()> {
    let config = RunConfig::default();
    let report = noise_study(&config)?;
    let study = report.blocks.noise_study.expect("noise study");
    let k = study.k.last().copied().unwrap_or_default();
    for (name, points) in [("label noise r", &study.label_noise), ("input noise delta", &study.input_noise)] {
        println!("{name}");
        for p in points {
            println!(
                "  {:.2}: accuracy {:?}, rho({k}) {:?}, beta_bar {:?}, kappa {:?}",
                p.level,
                p.test_accuracy,
                p.rho_at_largest_k(),
                p.beta_bar,
                p.kappa
            );
        }
    }
    Ok(())
}
