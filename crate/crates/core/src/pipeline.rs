//! End-to-end commands: train, extract, metrics, noise study, synthetic check.
//!
//! Each `cmd_*` function writes its artifacts under
//! [`RunConfig::output_path`] and returns what it wrote. The in-memory
//! helpers ([`extract_tables`], [`compute_metrics`], [`analyze_models`]) are
//! the same steps without files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{
    build_dictionary, discrimination_stats, effect_histogram, explanation_ratio, explanation_ratio_curve,
    multi_variable_strength, random_transfer_baseline, transfer_curve,
};
use crate::axioms::{run_synthetic_suite, SynthReport};
use crate::config::RunConfig;
use crate::data::{load_tabular, subcategory_filter, Population, SampleOrigin, SplitKind, TabularDataset};
use crate::error::{Error, Result};
use crate::lattice::{
    build_value_profile, efficiency_residual, efficiency_tolerance, harsanyi_transform, normalized_strength_curve,
    salient_set, InteractionTable, SalientSet,
};
use crate::mlp::{accuracy, train_mlp, Architecture, MlpModel, ModelValue, TrainReport};
use crate::report::{
    Blocks, DictionaryEntry, GammaBlock, KappaBlock, Metadata, MetricsReport, ModelLabel, NoisePoint, NoiseStudyBlock,
    RandomPoint, RhoBlock, SparsityBlock,
};
use crate::value::BaselinePolicy;

pub const TABLE_EXTENSION: &str = "hars";
pub const MODEL_EXTENSION: &str = "mlpw";

/// Loads the configured dataset and normalizes it with training statistics.
pub fn load_dataset(config: &RunConfig) -> Result<TabularDataset> {
    let d = &config.dataset;
    Ok(load_tabular(&d.path, d.schema, d.split_seed)?.normalized())
}

/// Masking baseline in the model's (normalized) input space. Configured
/// vectors are in raw feature units.
pub fn resolve_baseline(ds: &TabularDataset, policy: &BaselinePolicy) -> Result<Vec<f64>> {
    let n = ds.n_features();
    let raw = match policy {
        BaselinePolicy::PerVariableMean { means: None } => {
            let rows: Vec<&Vec<f64>> = ds.all_features().collect();
            return BaselinePolicy::per_variable_mean(&rows)?.resolve(n);
        }
        other => other.resolve(n)?,
    };
    Ok(match ds.normalization() {
        Some(norm) => norm.apply(&raw),
        None => raw,
    })
}

pub fn model_file_name(architecture: Architecture, seed: u64) -> String {
    format!("{}-s{seed}.{MODEL_EXTENSION}", architecture.slug())
}

/// Dividend table of one population member.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractedTable {
    pub origin: SampleOrigin,
    pub label: usize,
    pub residual: f64,
    #[serde(skip)]
    pub table: InteractionTable,
}

impl ExtractedTable {
    pub fn file_name(&self) -> String {
        let split = match self.origin.split {
            SplitKind::Train => "train",
            SplitKind::Test => "test",
        };
        format!("{split}-{:05}.{TABLE_EXTENSION}", self.origin.index)
    }
}

/// Log-odds dividends of every member against its own label. Fails with
/// [`Error::Invariant`] when a table does not sum back to `v(N)`.
pub fn extract_tables(model: &MlpModel, population: &Population, baseline: &[f64]) -> Result<Vec<ExtractedTable>> {
    (0..population.len())
        .into_par_iter()
        .map(|i| {
            let label = population.labels[i];
            let value = ModelValue::new(model, label)?;
            let profile = build_value_profile(&value, &population.features[i], baseline)?;
            let table = harsanyi_transform(&profile);
            let residual = efficiency_residual(&profile, &table)?;
            let tolerance = efficiency_tolerance(&profile);
            if residual > tolerance {
                return Err(Error::Invariant(format!(
                    "efficiency residual {residual:e} exceeds {tolerance:e} for sample {:?}",
                    population.origins[i]
                )));
            }
            Ok(ExtractedTable {
                origin: population.origins[i],
                label,
                residual,
                table,
            })
        })
        .collect()
}

fn common_n(tables: &[InteractionTable]) -> Result<usize> {
    let n = tables.first().ok_or(Error::Empty("no interaction tables"))?.n();
    if let Some(t) = tables.iter().find(|t| t.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: t.n(),
        });
    }
    Ok(n)
}

fn salient_all(tables: &[InteractionTable], ratio: f64, include_empty: bool) -> Result<Vec<SalientSet>> {
    tables.iter().map(|t| salient_set(t, ratio, include_empty)).collect()
}

/// Tables of a second model on the same samples, for transferability.
pub struct SecondModel<'a> {
    pub label: ModelLabel,
    pub tables: &'a [InteractionTable],
}

/// Every metric block except the noise study.
pub fn compute_metrics(
    config: &RunConfig,
    tables: &[InteractionTable],
    first: ModelLabel,
    second: Option<SecondModel<'_>>,
) -> Result<Blocks> {
    let a = &config.analysis;
    let n = common_n(tables)?;

    let salient = salient_all(tables, a.ratio, a.include_empty)?;
    let sizes: Vec<usize> = salient.iter().map(SalientSet::len).collect();
    let sparsity = SparsityBlock {
        ratio: a.ratio,
        include_empty: a.include_empty,
        candidates: (1usize << n) - usize::from(!a.include_empty),
        mean_salient: sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
        salient_sizes: sizes,
        curve: normalized_strength_curve(tables, false)?,
        curve_with_empty: normalized_strength_curve(tables, true)?,
    };

    let rho = rho_block(config, tables)?;

    let gamma = match second {
        Some(s) => Some(gamma_block(config, tables, first, s, n)?),
        None => None,
    };

    let discrimination = discrimination_stats(tables, a.ratio)?;
    let kappa = KappaBlock {
        ratio: a.ratio,
        kappa: multi_variable_strength(&salient)?,
    };

    let top = build_dictionary(&salient, a.histogram_concepts)?;
    let histograms = top
        .entries
        .iter()
        .map(|&s| effect_histogram(s, tables, a.ratio, a.histogram_bins))
        .collect::<Result<_>>()?;

    Ok(Blocks {
        sparsity_curve: Some(sparsity),
        rho_curve: Some(rho),
        gamma_curve: gamma,
        discrimination: Some(discrimination),
        kappa: Some(kappa),
        histograms,
        noise_study: None,
    })
}

fn rho_block(config: &RunConfig, tables: &[InteractionTable]) -> Result<RhoBlock> {
    let a = &config.analysis;
    let sets = salient_all(tables, a.dictionary_ratio, false)?;
    let vanilla = salient_all(tables, a.vanilla_ratio, false)?;
    let largest = *a.k_grid.iter().max().expect("validated non-empty");
    let dictionary = build_dictionary(&sets, largest)?;
    let excluded = explanation_ratio(&dictionary, &sets)?.excluded;
    let values = |s: &[SalientSet]| -> Result<Vec<f64>> {
        Ok(explanation_ratio_curve(s, &a.k_grid)?.into_iter().map(|(_, r)| r).collect())
    };
    Ok(RhoBlock {
        ratio: a.dictionary_ratio,
        k: a.k_grid.clone(),
        rho: values(&sets)?,
        vanilla_ratio: a.vanilla_ratio,
        vanilla_rho: values(&vanilla)?,
        excluded,
        dictionary: dictionary
            .entries
            .iter()
            .zip(&dictionary.frequency)
            .map(|(&concept, &frequency)| DictionaryEntry { concept, frequency })
            .collect(),
        shortfall: dictionary.shortfall,
    })
}

fn gamma_block(
    config: &RunConfig,
    tables: &[InteractionTable],
    first: ModelLabel,
    second: SecondModel<'_>,
    n: usize,
) -> Result<GammaBlock> {
    let a = &config.analysis;
    let second_n = common_n(second.tables)?;
    if second_n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: second_n,
        });
    }
    let points = transfer_curve(tables, second.tables, &a.transfer_ratios, a.transfer_reference_ratio)?;
    let reference = salient_all(second.tables, a.transfer_reference_ratio, false)?;
    let universe = (1usize << n) - 1;
    let size2 = (reference.iter().map(SalientSet::len).sum::<usize>() as f64 / reference.len() as f64).round() as usize;
    let random = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let size1 = (p.mean_size.round() as usize).clamp(1, universe);
            let seed = a.sampling_seed.wrapping_add(i as u64);
            Ok(RandomPoint {
                ratio: p.ratio,
                size1,
                size2,
                seed,
                baseline: random_transfer_baseline(size1, size2.min(universe), n, a.random_trials, seed)?,
            })
        })
        .collect::<Result<_>>()?;
    let pairing = if first.architecture == second.label.architecture {
        "same-architecture"
    } else {
        "cross-architecture"
    };
    Ok(GammaBlock {
        first,
        second: second.label,
        pairing: pairing.into(),
        reference_ratio: a.transfer_reference_ratio,
        points,
        random,
    })
}

/// The category population, the masking baseline, and the tables of
/// `first` (and `second`) on it, combined into a metrics report.
pub fn analyze_models(
    config: &RunConfig,
    ds: &TabularDataset,
    first: &MlpModel,
    second: Option<&MlpModel>,
) -> Result<MetricsReport> {
    let population = subcategory_filter(ds, &config.analysis.category)?;
    if population.is_empty() {
        return Err(Error::EmptySelection(config.analysis.category.clone()));
    }
    let baseline = resolve_baseline(ds, &config.analysis.baseline)?;
    let tables = tables_of(&extract_tables(first, &population, &baseline)?);
    let second_tables = match second {
        Some(m) => Some(tables_of(&extract_tables(m, &population, &baseline)?)),
        None => None,
    };
    let label = |m: &MlpModel| ModelLabel {
        architecture: m.architecture(),
        seed: m.seed(),
    };
    let blocks = compute_metrics(
        config,
        &tables,
        label(first),
        second.zip(second_tables.as_deref()).map(|(m, t)| SecondModel {
            label: label(m),
            tables: t,
        }),
    )?;
    let mut sources = vec![model_file_name(first.architecture(), first.seed())];
    sources.extend(second.map(|m| model_file_name(m.architecture(), m.seed())));
    Ok(MetricsReport {
        metadata: Metadata::new("analyze", config, ds.n_features(), population.len(), sources),
        blocks,
    })
}

fn tables_of(extracted: &[ExtractedTable]) -> Vec<InteractionTable> {
    extracted.iter().map(|e| e.table.clone()).collect()
}

/// Accuracy record written next to a trained model.
#[derive(Clone, Debug, Serialize)]
pub struct TrainRecord {
    pub tool: String,
    pub version: String,
    pub dataset: String,
    pub model_file: String,
    pub report: TrainReport,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: MlpModel,
    pub model_path: PathBuf,
    pub record_path: PathBuf,
    pub report: TrainReport,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Trains the configured architecture with `model.seed` and saves it.
pub fn cmd_train(config: &RunConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let ds = load_dataset(config)?;
    let (model, report) = train_mlp(&ds, config.model.architecture, &config.training, config.model.seed)?;
    let dir = config.output_path();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let name = model_file_name(model.architecture(), model.seed());
    let model_path = dir.join(&name);
    model.save(&model_path)?;
    let record_path = model_path.with_extension("json");
    write_json(
        &record_path,
        &TrainRecord {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            dataset: config.dataset.path.clone(),
            model_file: name,
            report: report.clone(),
        },
    )?;
    Ok(TrainOutcome {
        model,
        model_path,
        record_path,
        report,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractManifest {
    pub model_file: String,
    pub architecture: Architecture,
    pub seed: u64,
    pub selector: String,
    pub baseline: Vec<f64>,
    pub max_residual: f64,
    pub tables: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    #[serde(flatten)]
    pub table: ExtractedTable,
}

#[derive(Clone, Debug)]
pub struct ExtractOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub manifest: ExtractManifest,
}

/// Writes one table per selected sample into
/// `<output>/tables-<arch>-s<seed>/`, plus a `manifest.json`. Nothing is
/// written unless every table passes the efficiency check.
pub fn cmd_extract(config: &RunConfig, model_path: &Path, selector: Option<&str>) -> Result<ExtractOutcome> {
    config.validate()?;
    let ds = load_dataset(config)?;
    let model = MlpModel::load(model_path)?;
    if model.input_dim() != ds.n_features() {
        return Err(Error::DimensionMismatch {
            expected: ds.n_features(),
            actual: model.input_dim(),
        });
    }
    let selector = selector.unwrap_or(&config.analysis.category);
    let population = subcategory_filter(&ds, selector)?;
    if population.is_empty() {
        return Err(Error::EmptySelection(selector.to_string()));
    }
    let baseline = resolve_baseline(&ds, &config.analysis.baseline)?;
    let extracted = extract_tables(&model, &population, &baseline)?;

    let dir = config
        .output_path()
        .join(format!("tables-{}-s{}", model.architecture().slug(), model.seed()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::with_capacity(extracted.len());
    let mut entries = Vec::with_capacity(extracted.len());
    for e in extracted {
        let name = e.file_name();
        let path = dir.join(&name);
        e.table.save(&path)?;
        files.push(path);
        entries.push(ManifestEntry { file: name, table: e });
    }
    let manifest = ExtractManifest {
        model_file: model_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        architecture: model.architecture(),
        seed: model.seed(),
        selector: selector.to_string(),
        baseline,
        max_residual: entries.iter().fold(0.0, |m, e| f64::max(m, e.table.residual)),
        tables: entries,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(ExtractOutcome { dir, files, manifest })
}

/// Table files named by `paths`; directories contribute their `.hars` files
/// in name order.
pub fn collect_table_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == TABLE_EXTENSION))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Metrics over saved tables. `second` holds the second model's tables for
/// the same samples, matched by file name; when empty no `gamma_curve` is
/// emitted. Writes `metrics.json` and CSV curves.
pub fn cmd_metrics(config: &RunConfig, tables: &[PathBuf], second: &[PathBuf]) -> Result<MetricsReport> {
    config.validate()?;
    let files = collect_table_files(tables)?;
    if files.is_empty() {
        return Err(Error::Empty("no interaction table files"));
    }
    let loaded: Vec<InteractionTable> = files.iter().map(InteractionTable::load).collect::<Result<_>>()?;
    let n = common_n(&loaded)?;

    let second_files = collect_table_files(second)?;
    let second_loaded: Vec<InteractionTable> = second_files.iter().map(InteractionTable::load).collect::<Result<_>>()?;
    if !second_files.is_empty() {
        let a: Vec<String> = files.iter().map(|p| file_label(p)).collect();
        let b: Vec<String> = second_files.iter().map(|p| file_label(p)).collect();
        if a != b {
            return Err(Error::InvalidParameter(
                "second-model tables must cover the same samples as the first".into(),
            ));
        }
    }

    let first = ModelLabel {
        architecture: config.model.architecture,
        seed: config.model.seed,
    };
    let second = (!second_loaded.is_empty()).then(|| SecondModel {
        label: ModelLabel {
            architecture: config.second_architecture(),
            seed: config.model.second_seed,
        },
        tables: &second_loaded,
    });
    let blocks = compute_metrics(config, &loaded, first, second)?;
    let sources = files.iter().chain(&second_files).map(|p| file_label(p)).collect();
    let report = MetricsReport {
        metadata: Metadata::new("metrics", config, n, loaded.len(), sources),
        blocks,
    };
    report.write(&config.output_path(), "metrics")?;
    Ok(report)
}

/// Label-noise and input-noise sweeps: retrain at each grid point and
/// measure `ρ(k)`, `β̄` and `κ` on the clean category population. A grid
/// point whose training diverges is recorded and skipped.
pub fn noise_study(config: &RunConfig) -> Result<MetricsReport> {
    config.validate()?;
    let noise = &config.noise;
    if noise.label_ratios.is_empty() && noise.input_strengths.is_empty() {
        return Err(Error::Config("noise grids are empty".into()));
    }
    let clean = load_dataset(config)?;
    let population = subcategory_filter(&clean, &config.analysis.category)?;
    if population.is_empty() {
        return Err(Error::EmptySelection(config.analysis.category.clone()));
    }
    let baseline = resolve_baseline(&clean, &config.analysis.baseline)?;

    let evaluate = |ds: &TabularDataset, level: f64| -> Result<NoisePoint> {
        let model = match train_mlp(ds, config.model.architecture, &config.training, config.model.seed) {
            Ok((m, _)) => m,
            Err(e @ Error::Divergence { .. }) => return Ok(failed_point(level, e.to_string())),
            Err(e) => return Err(e),
        };
        let tables = tables_of(&extract_tables(&model, &population, &baseline)?);
        let rho = rho_block(config, &tables)?;
        let salient = salient_all(&tables, config.analysis.ratio, config.analysis.include_empty)?;
        Ok(NoisePoint {
            level,
            status: "ok".into(),
            test_accuracy: Some(accuracy(&model, &clean.test.features, &clean.test.labels)),
            rho: rho.rho,
            beta_bar: Some(discrimination_stats(&tables, config.analysis.ratio)?.beta_bar),
            kappa: Some(multi_variable_strength(&salient)?.mean),
        })
    };

    let mut clean_point: Option<NoisePoint> = None;
    let mut at_zero = |level: f64| -> Result<NoisePoint> {
        if clean_point.is_none() {
            clean_point = Some(evaluate(&clean, level)?);
        }
        Ok(clean_point.clone().expect("just computed"))
    };

    let mut label_noise = Vec::new();
    for &r in &noise.label_ratios {
        label_noise.push(if r == 0.0 {
            at_zero(r)?
        } else {
            evaluate(&clean.corrupt_labels(r, noise.corruption_seed)?, r)?
        });
    }
    let mut input_noise = Vec::new();
    for &d in &noise.input_strengths {
        input_noise.push(if d == 0.0 {
            at_zero(d)?
        } else {
            evaluate(&clean.corrupt_inputs(d, noise.corruption_seed)?, d)?
        });
    }

    let sources = vec![model_file_name(config.model.architecture, config.model.seed)];
    Ok(MetricsReport {
        metadata: Metadata::new("noise-study", config, clean.n_features(), population.len(), sources),
        blocks: Blocks {
            noise_study: Some(NoiseStudyBlock {
                corruption_seed: noise.corruption_seed,
                k: config.analysis.k_grid.clone(),
                label_noise,
                input_noise,
            }),
            ..Blocks::default()
        },
    })
}

fn failed_point(level: f64, reason: String) -> NoisePoint {
    NoisePoint {
        level,
        status: reason,
        test_accuracy: None,
        rho: Vec::new(),
        beta_bar: None,
        kappa: None,
    }
}

/// [`noise_study`], written to `noise-study.json` and its CSV.
pub fn cmd_noise_study(config: &RunConfig) -> Result<MetricsReport> {
    let report = noise_study(config)?;
    report.write(&config.output_path(), "noise-study")?;
    Ok(report)
}

/// Runs the axiom suite over synthetic games and writes `synth-check.json`.
/// A failing check is reported in the result, not as an error.
pub fn cmd_synth_check(config: &RunConfig) -> Result<SynthReport> {
    let s = &config.synth;
    let report = run_synthetic_suite(s.seed, s.max_n, s.games_per_size)?;
    write_json(&config.output_path().join("synth-check.json"), &report)?;
    Ok(report)
}
