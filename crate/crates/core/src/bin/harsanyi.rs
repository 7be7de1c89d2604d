use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harsanyi::config::RunConfig;
use harsanyi::data::Schema;
use harsanyi::mlp::Architecture;
use harsanyi::pipeline;
use harsanyi::Error;

/// Harsanyi interaction concepts of tabular MLPs.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (relative paths go under $HARSANYI_OUTPUT_ROOT).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Dataset file, or builtin:tictactoe / builtin:wifi-surrogate.
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    schema: Option<Schema>,
    #[arg(long)]
    arch: Option<Architecture>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    second_seed: Option<u64>,
    /// Sample selector, e.g. category-4, class-0, row2.
    #[arg(long)]
    category: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and save it with its accuracy record.
    Train(Common),
    /// Write one interaction table per selected sample.
    Extract {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
    },
    /// Compute concept metrics from saved tables.
    Metrics {
        #[command(flatten)]
        common: Common,
        /// Table files or directories.
        #[arg(long, required = true, num_args = 1..)]
        tables: Vec<PathBuf>,
        /// Tables of a second model on the same samples.
        #[arg(long, num_args = 1..)]
        second: Vec<PathBuf>,
    },
    /// Retrain under label and input noise and track concept metrics.
    NoiseStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        label_ratios: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        input_strengths: Option<Vec<f64>>,
    },
    /// Check the dividend axioms on synthetic games.
    SynthCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_n: Option<usize>,
    },
}

fn load(c: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &c.output_dir {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = &c.dataset {
        cfg.dataset.path = v.clone();
    }
    if let Some(v) = c.schema {
        cfg.dataset.schema = v;
    }
    if let Some(v) = c.arch {
        cfg.model.architecture = v;
    }
    if let Some(v) = c.seed {
        cfg.model.seed = v;
    }
    if let Some(v) = c.second_seed {
        cfg.model.second_seed = v;
    }
    if let Some(v) = &c.category {
        cfg.analysis.category = v.clone();
    }
    if let Some(v) = c.epochs {
        cfg.training.epochs = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Train(common) => {
            let cfg = load(&common)?;
            let out = pipeline::cmd_train(&cfg)?;
            let r = &out.report;
            println!(
                "{} seed {}: train accuracy {:.4}, test accuracy {:.4}, loss {:.6}",
                r.architecture, r.seed, r.train_accuracy, r.test_accuracy, r.final_loss
            );
            println!("model written to {}", out.model_path.display());
        }
        Command::Extract { common, model } => {
            let cfg = load(&common)?;
            let out = pipeline::cmd_extract(&cfg, &model, common.category.as_deref())?;
            for e in &out.manifest.tables {
                println!("{} residual {:e}", e.file, e.table.residual);
            }
            println!("{} tables written to {}", out.files.len(), out.dir.display());
        }
        Command::Metrics { common, tables, second } => {
            let cfg = load(&common)?;
            let report = pipeline::cmd_metrics(&cfg, &tables, &second)?;
            println!("{} samples, report written to {}", report.metadata.samples, cfg.output_path().display());
        }
        Command::NoiseStudy {
            common,
            label_ratios,
            input_strengths,
        } => {
            let mut cfg = load(&common)?;
            if let Some(v) = label_ratios {
                cfg.noise.label_ratios = v;
            }
            if let Some(v) = input_strengths {
                cfg.noise.input_strengths = v;
            }
            let report = pipeline::cmd_noise_study(&cfg)?;
            if let Some(study) = &report.blocks.noise_study {
                for (name, points) in [("label", &study.label_noise), ("input", &study.input_noise)] {
                    for p in points {
                        println!(
                            "{name} {}: {} rho {:?} beta_bar {:?}",
                            p.level,
                            p.status,
                            p.rho_at_largest_k(),
                            p.beta_bar
                        );
                    }
                }
            }
        }
        Command::SynthCheck { common, max_n } => {
            let mut cfg = load(&common)?;
            if let Some(v) = max_n {
                cfg.synth.max_n = v;
            }
            let report = pipeline::cmd_synth_check(&cfg)?;
            for c in &report.checks {
                let verdict = if c.passed { "ok" } else { "FAILED" };
                println!("{:<28} {verdict:<6} games {:>4} max error {:e}", c.name, c.games, c.max_error);
            }
            if !report.passed() {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
