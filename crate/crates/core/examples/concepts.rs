// Concept metrics of MLP-5 on the wifi data, room 4: sparsity, dictionary
// explanation ratio, discrimination power and multi-variable strength.
//
// Pass a wifi localization file as the first argument to use it instead of
// the bundled surrogate.

use harsanyi::config::RunConfig;
use harsanyi::mlp::train_mlp;
use harsanyi::pipeline::{analyze_models, load_dataset};

fn main() -> harsanyi::Result<()> {
    let mut config = RunConfig::default();
    if let Some(path) = std::env::args().nth(1) {
        config.dataset.path = path;
    }
    let ds = load_dataset(&config)?;
    let (model, report) = train_mlp(&ds, config.model.architecture, &config.training, config.model.seed)?;
    println!("test accuracy {:.4}", report.test_accuracy);

    let report = analyze_models(&config, &ds, &model, None)?;
    let b = &report.blocks;
    let s = b.sparsity_curve.as_ref().expect("sparsity");
    println!(
        "{} samples, mean salient concepts {:.1} of {}",
        report.metadata.samples, s.mean_salient, s.candidates
    );
    let rho = b.rho_curve.as_ref().expect("rho");
    for (k, r) in rho.k.iter().zip(&rho.rho) {
        println!("rho({k:>3}) = {r:.3}");
    }
    let d = b.discrimination.as_ref().expect("discrimination");
    println!("beta_bar = {:.3} over {} concepts", d.beta_bar, d.concepts.len());
    for bucket in &d.buckets {
        println!("  alpha in ({:.1}, {:.1}]: {:>3} concepts, mean beta {:?}", bucket.lower, bucket.upper, bucket.concepts, bucket.mean_beta);
    }
    println!("kappa = {:.3}", b.kappa.as_ref().expect("kappa").kappa.mean);
    for h in &b.histograms {
        println!("{}: mean effect {:?}, sign consistency {:?}", h.concept, h.mean, h.sign_consistency);
    }
    Ok(())
}
