// Train MLP-5 and ResMLP-5 on the tic-tac-toe endgame table, then save and
// reload a model.

use harsanyi::data::{load_tabular, Schema};
use harsanyi::mlp::{predict_probabilities, train_mlp, Architecture, HyperParams, MlpModel};

fn main() -> harsanyi::Result<()> {
    let ds = load_tabular("builtin:tictactoe", Schema::Tictactoe, 7)?.normalized();
    println!("{} samples, {} features, classes {:?}", ds.len(), ds.n_features(), ds.class_names);

    let hp = HyperParams {
        epochs: 60,
        ..HyperParams::default()
    };
    let mut first = None;
    for arch in [Architecture::Mlp5, Architecture::ResMlp5] {
        let (model, report) = train_mlp(&ds, arch, &hp, 1)?;
        println!(
            "{arch}: train {:.4}, test {:.4} in {:.1}s",
            report.train_accuracy, report.test_accuracy, report.seconds
        );
        first.get_or_insert(model);
    }

    let model = first.expect("trained");
    let path = std::env::temp_dir().join("harsanyi-example.mlpw");
    model.save(&path)?;
    let back = MlpModel::load(&path)?;
    let x = &ds.test.features[0];
    println!("reloaded model agrees: {:?}", predict_probabilities(&back, x)? == predict_probabilities(&model, x)?);
    std::fs::remove_file(&path).ok();
    Ok(())
}
