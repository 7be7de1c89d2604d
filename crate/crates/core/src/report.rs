//! Metric reports: one JSON document plus flat CSV curves.
//!
//! Reports carry no wall-clock data so that identical runs produce
//! identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analytics::{Discrimination, EffectHistogram, Expectation, RandomBaseline, TransferPoint};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::lattice::VariableSet;
use crate::mlp::Architecture;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub metadata: Metadata,
    pub blocks: Blocks,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    /// Variables per sample.
    pub n: usize,
    pub samples: usize,
    /// Table files or model runs the metrics were computed from.
    pub sources: Vec<String>,
}

impl Metadata {
    pub fn new(command: &str, config: &RunConfig, n: usize, samples: usize, sources: Vec<String>) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            n,
            samples,
            sources,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Blocks {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sparsity_curve: Option<SparsityBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_curve: Option<RhoBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_curve: Option<GammaBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrimination: Option<Discrimination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<KappaBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub histograms: Vec<EffectHistogram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_study: Option<NoiseStudyBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsityBlock {
    pub ratio: f64,
    pub include_empty: bool,
    /// Candidate concepts per sample (`2^n − 1` without the empty set).
    pub candidates: usize,
    pub mean_salient: f64,
    pub salient_sizes: Vec<usize>,
    /// Mean normalized strength by rank, with and without the empty set.
    pub curve: Vec<f64>,
    pub curve_with_empty: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoBlock {
    pub ratio: f64,
    pub k: Vec<usize>,
    pub rho: Vec<f64>,
    pub vanilla_ratio: f64,
    pub vanilla_rho: Vec<f64>,
    /// Samples left out because their salient set is empty.
    pub excluded: usize,
    /// Dictionary at the largest `k`.
    pub dictionary: Vec<DictionaryEntry>,
    pub shortfall: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DictionaryEntry {
    pub concept: VariableSet,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaBlock {
    pub first: ModelLabel,
    pub second: ModelLabel,
    /// `same-architecture` or `cross-architecture`.
    pub pairing: String,
    pub reference_ratio: f64,
    pub points: Vec<TransferPoint>,
    pub random: Vec<RandomPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelLabel {
    pub architecture: Architecture,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomPoint {
    pub ratio: f64,
    pub size1: usize,
    pub size2: usize,
    pub seed: u64,
    pub baseline: RandomBaseline,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaBlock {
    pub ratio: f64,
    pub kappa: Expectation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseStudyBlock {
    pub corruption_seed: u64,
    pub k: Vec<usize>,
    pub label_noise: Vec<NoisePoint>,
    pub input_noise: Vec<NoisePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisePoint {
    pub level: f64,
    /// `ok`, or the reason this grid point has no metrics.
    pub status: String,
    pub test_accuracy: Option<f64>,
    pub rho: Vec<f64>,
    pub beta_bar: Option<f64>,
    pub kappa: Option<f64>,
}

impl NoisePoint {
    pub fn rho_at_largest_k(&self) -> Option<f64> {
        self.rho.last().copied()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV curves keyed by file name.
    pub fn csv_files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        let b = &self.blocks;
        if let Some(s) = &b.sparsity_curve {
            let mut t = String::from("rank,strength\n");
            for (i, v) in s.curve.iter().enumerate() {
                writeln!(t, "{},{}", i + 1, v).unwrap();
            }
            files.push(("sparsity_curve.csv".into(), t));
        }
        if let Some(r) = &b.rho_curve {
            let mut t = String::from("k,rho,vanilla_rho\n");
            for ((k, a), v) in r.k.iter().zip(&r.rho).zip(&r.vanilla_rho) {
                writeln!(t, "{k},{a},{v}").unwrap();
            }
            files.push(("rho_curve.csv".into(), t));
        }
        if let Some(g) = &b.gamma_curve {
            let mut t = String::from("ratio,gamma,mean_size,random_gamma,random_analytic\n");
            for (p, r) in g.points.iter().zip(&g.random) {
                writeln!(
                    t,
                    "{},{},{},{},{}",
                    p.ratio, p.gamma, p.mean_size, r.baseline.mean, r.baseline.analytic
                )
                .unwrap();
            }
            files.push(("gamma_curve.csv".into(), t));
        }
        if let Some(d) = &b.discrimination {
            let mut t = String::from("alpha_lower,alpha_upper,concepts,mean_beta\n");
            for bucket in &d.buckets {
                writeln!(
                    t,
                    "{},{},{},{}",
                    bucket.lower,
                    bucket.upper,
                    bucket.concepts,
                    opt(bucket.mean_beta)
                )
                .unwrap();
            }
            files.push(("discrimination.csv".into(), t));
        }
        if let Some(n) = &b.noise_study {
            let mut t = String::from("sweep,level,status,test_accuracy,rho_largest_k,beta_bar,kappa\n");
            for (sweep, points) in [("label", &n.label_noise), ("input", &n.input_noise)] {
                for p in points {
                    writeln!(
                        t,
                        "{sweep},{},{},{},{},{},{}",
                        p.level,
                        p.status,
                        opt(p.test_accuracy),
                        opt(p.rho_at_largest_k()),
                        opt(p.beta_bar),
                        opt(p.kappa)
                    )
                    .unwrap();
                }
            }
            files.push(("noise_study.csv".into(), t));
        }
        files
    }

    /// Writes `<stem>.json` and the CSV curves (prefixed `<stem>_`) into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, self.to_json()).map_err(|e| Error::io(&json, e))?;
        written.push(json);
        for (name, text) in self.csv_files() {
            let path = dir.join(format!("{stem}_{name}"));
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
