//! Tabular datasets: ingestion, seeded splits, normalization, category
//! filters, and the label/input corruption generators.

mod builtin;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{tictactoe_endgame_text, wifi_surrogate_text, WIFI_SURROGATE_PER_ROOM};

/// Fraction of samples assigned to the test split.
pub const TEST_FRACTION: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schema {
    /// Seven whitespace-separated RSSI integers and a room label 1–4.
    Wifi,
    /// Nine comma-separated cells from `{x, o, b}` and `positive`/`negative`.
    #[serde(alias = "tic-tac-toe")]
    Tictactoe,
    /// Header row, numeric feature columns, and a `label` (or last) column.
    GenericCsv,
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wifi" => Ok(Schema::Wifi),
            "tictactoe" | "tic-tac-toe" => Ok(Schema::Tictactoe),
            "generic-csv" | "csv" => Ok(Schema::GenericCsv),
            other => Err(Error::Config(format!("unknown schema {other:?}"))),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schema::Wifi => "wifi",
            Schema::Tictactoe => "tictactoe",
            Schema::GenericCsv => "generic-csv",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Split {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Zero-based data-row index in the source file.
    pub rows: Vec<usize>,
}

impl Split {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Per-column statistics of the training split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalization {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn invert(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| v * s + m)
            .collect()
    }
}

/// A corruption applied to the training split.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Corruption {
    LabelNoise { ratio: f64, seed: u64, touched: usize },
    InputNoise { strength: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TabularDataset {
    pub schema: Schema,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub train: Split,
    pub test: Split,
    pub split_seed: u64,
    normalization: Option<Normalization>,
    corruptions: Vec<Corruption>,
}

impl TabularDataset {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    pub fn corruptions(&self) -> &[Corruption] {
        &self.corruptions
    }

    /// Both splits, train first.
    pub fn all_features(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.train.features.iter().chain(&self.test.features)
    }

    /// Standardizes every column with training-split statistics, applied to
    /// both splits. Constant columns keep unit scale.
    pub fn normalized(mut self) -> Self {
        if self.normalization.is_some() {
            return self;
        }
        let d = self.n_features();
        let count = self.train.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for row in &self.train.features {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= count);
        let mut var = vec![0.0; d];
        for row in &self.train.features {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / count).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        let norm = Normalization { mean, std };
        for split in [&mut self.train, &mut self.test] {
            for row in &mut split.features {
                *row = norm.apply(row);
            }
        }
        self.normalization = Some(norm);
        self
    }

    /// Features in source units.
    pub fn raw_features(&self, x: &[f64]) -> Vec<f64> {
        match &self.normalization {
            Some(norm) => norm.invert(x),
            None => x.to_vec(),
        }
    }

    /// Replaces `⌊r·|train|⌋` seeded training labels with uniform draws over
    /// all classes; a draw may repeat the original label.
    pub fn corrupt_labels(&self, ratio: f64, seed: u64) -> Result<Self> {
        check_unit("label-noise ratio", ratio)?;
        let mut out = self.clone();
        let touched = (ratio * self.train.len() as f64).floor() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let classes = self.n_classes();
        for i in sample_indices(&mut rng, self.train.len(), touched).into_vec() {
            out.train.labels[i] = rng.random_range(0..classes);
        }
        out.corruptions.push(Corruption::LabelNoise {
            ratio,
            seed,
            touched,
        });
        Ok(out)
    }

    /// Replaces each training sample by `(1 − δ)·x + δ·ε`, `ε ∼ N(0, I)`.
    /// Requires a normalized dataset.
    pub fn corrupt_inputs(&self, strength: f64, seed: u64) -> Result<Self> {
        check_unit("input-noise strength", strength)?;
        if self.normalization.is_none() {
            return Err(Error::NotNormalized);
        }
        let mut out = self.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for row in &mut out.train.features {
            for x in row.iter_mut() {
                let eps: f64 = rng.sample(StandardNormal);
                *x = (1.0 - strength) * *x + strength * eps;
            }
        }
        out.corruptions.push(Corruption::InputNoise { strength, seed });
        Ok(out)
    }
}

fn check_unit(what: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!("{what} must lie in [0, 1], got {value}")));
    }
    Ok(())
}

struct Parsed {
    feature_names: Vec<String>,
    class_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_wifi(text: &str, source: &str) -> Result<Parsed> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 8 {
            return Err(parse_error(source, lineno, format!("expected 8 fields, found {}", tokens.len())));
        }
        let row = tokens[..7]
            .iter()
            .map(|t| {
                t.parse::<i64>()
                    .map(|v| v as f64)
                    .map_err(|_| parse_error(source, lineno, format!("non-integer signal {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let room: usize = tokens[7]
            .parse()
            .map_err(|_| parse_error(source, lineno, format!("bad room label {:?}", tokens[7])))?;
        if !(1..=4).contains(&room) {
            return Err(parse_error(source, lineno, format!("room {room} outside 1-4")));
        }
        rows.push(row);
        labels.push(room - 1);
    }
    Ok(Parsed {
        feature_names: (1..=7).map(|i| format!("rssi{i}")).collect(),
        class_names: (1..=4).map(|r| r.to_string()).collect(),
        rows,
        labels,
    })
}

fn parse_tictactoe(text: &str, source: &str) -> Result<Parsed> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        if tokens.len() != 10 {
            return Err(parse_error(source, lineno, format!("expected 10 fields, found {}", tokens.len())));
        }
        let row = tokens[..9]
            .iter()
            .map(|t| match *t {
                "x" => Ok(1.0),
                "o" => Ok(-1.0),
                "b" => Ok(0.0),
                other => Err(parse_error(source, lineno, format!("unknown cell symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let label = match tokens[9] {
            "positive" => 1,
            "negative" => 0,
            other => return Err(parse_error(source, lineno, format!("unknown class {other:?}"))),
        };
        rows.push(row);
        labels.push(label);
    }
    Ok(Parsed {
        feature_names: (1..=9).map(|i| format!("x{i}")).collect(),
        class_names: vec!["negative".into(), "positive".into()],
        rows,
        labels,
    })
}

fn parse_generic(text: &str, source: &str) -> Result<Parsed> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers.len() < 2 {
        return Err(parse_error(source, 1, "need at least one feature and a label column"));
    }
    let label_col = headers.iter().position(|h| h == "label").unwrap_or(headers.len() - 1);
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_col)
        .map(|(_, h)| h.clone())
        .collect();
    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let lineno = k + 2;
        let record = record.map_err(|e| parse_error(source, lineno, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(parse_error(source, lineno, "field count differs from header"));
        }
        let mut row = Vec::with_capacity(feature_names.len());
        for (i, field) in record.iter().enumerate() {
            if i == label_col {
                raw_labels.push(field.to_string());
            } else {
                row.push(
                    field
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_error(source, lineno, format!("non-numeric value {field:?}")))?,
                );
            }
        }
        rows.push(row);
    }
    let mut class_names: Vec<String> = raw_labels.clone();
    class_names.sort_by(|a, b| match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    });
    class_names.dedup();
    let labels = raw_labels
        .iter()
        .map(|l| class_names.iter().position(|c| c == l).expect("label collected above"))
        .collect();
    Ok(Parsed {
        feature_names,
        class_names,
        rows,
        labels,
    })
}

/// Parses dataset text under `schema` and splits it 80/20 by a seeded shuffle.
pub fn parse_tabular(text: &str, schema: Schema, split_seed: u64, source: &str) -> Result<TabularDataset> {
    let parsed = match schema {
        Schema::Wifi => parse_wifi(text, source)?,
        Schema::Tictactoe => parse_tictactoe(text, source)?,
        Schema::GenericCsv => parse_generic(text, source)?,
    };
    if parsed.rows.is_empty() {
        return Err(parse_error(source, 0, "no data rows"));
    }
    let total = parsed.rows.len();
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed));
    let test_len = (total as f64 * TEST_FRACTION).round() as usize;
    let (test_idx, train_idx) = order.split_at(test_len);
    let take = |idx: &[usize]| {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        Split {
            features: idx.iter().map(|&i| parsed.rows[i].clone()).collect(),
            labels: idx.iter().map(|&i| parsed.labels[i]).collect(),
            rows: idx,
        }
    };
    Ok(TabularDataset {
        schema,
        feature_names: parsed.feature_names.clone(),
        class_names: parsed.class_names.clone(),
        train: take(train_idx),
        test: take(test_idx),
        split_seed,
        normalization: None,
        corruptions: Vec::new(),
    })
}

/// Reads a dataset file. The pseudo-paths `builtin:tictactoe` and
/// `builtin:wifi-surrogate` load the bundled generators instead.
pub fn load_tabular(path: impl AsRef<Path>, schema: Schema, split_seed: u64) -> Result<TabularDataset> {
    let path = path.as_ref();
    let name = path.to_string_lossy();
    let text = match name.as_ref() {
        "builtin:tictactoe" => tictactoe_endgame_text(),
        "builtin:wifi-surrogate" => wifi_surrogate_text(0),
        _ => std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
    };
    parse_tabular(&text, schema, split_seed, &name)
}

/// Which split a population member came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    Train,
    Test,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SampleOrigin {
    pub split: SplitKind,
    pub index: usize,
}

/// A filtered set of samples with their labels and origins.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Population {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub origins: Vec<SampleOrigin>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// The eight three-in-a-row patterns, one-based board positions row-major.
pub const TICTACTOE_LINES: [(&str, [usize; 3]); 8] = [
    ("row1", [1, 2, 3]),
    ("row2", [4, 5, 6]),
    ("row3", [7, 8, 9]),
    ("col1", [1, 4, 7]),
    ("col2", [2, 5, 8]),
    ("col3", [3, 6, 9]),
    ("diagonal", [1, 5, 9]),
    ("anti-diagonal", [3, 5, 7]),
];

enum Predicate {
    Any,
    Class(usize),
    Line([usize; 3]),
}

fn predicate(ds: &TabularDataset, name: &str) -> Result<Predicate> {
    if name == "all" {
        return Ok(Predicate::Any);
    }
    if let Some(class) = name.strip_prefix("category-") {
        return ds
            .class_names
            .iter()
            .position(|c| c == class)
            .map(Predicate::Class)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()));
    }
    if let Some(idx) = name.strip_prefix("class-") {
        return idx
            .parse::<usize>()
            .ok()
            .filter(|&i| i < ds.n_classes())
            .map(Predicate::Class)
            .ok_or_else(|| Error::UnknownCategory(name.to_string()));
    }
    if ds.schema == Schema::Tictactoe {
        if let Some((_, line)) = TICTACTOE_LINES.iter().find(|(n, _)| *n == name) {
            return Ok(Predicate::Line(*line));
        }
    }
    Err(Error::UnknownCategory(name.to_string()))
}

/// Samples of both splits (train first) matching a named sub-category:
/// `all`, `category-<class name>`, `class-<index>`, or for tic-tac-toe one
/// of the [`TICTACTOE_LINES`] patterns (`x_i = x_j = x_k = 1`).
pub fn subcategory_filter(ds: &TabularDataset, name: &str) -> Result<Population> {
    let pred = predicate(ds, name)?;
    let mut out = Population::default();
    for (kind, split) in [(SplitKind::Train, &ds.train), (SplitKind::Test, &ds.test)] {
        for (index, (x, &label)) in split.features.iter().zip(&split.labels).enumerate() {
            let keep = match &pred {
                Predicate::Any => true,
                Predicate::Class(c) => label == *c,
                Predicate::Line(cells) => {
                    let raw = ds.raw_features(x);
                    cells.iter().all(|&c| (raw[c - 1] - 1.0).abs() < 1e-9)
                }
            };
            if keep {
                out.features.push(x.clone());
                out.labels.push(label);
                out.origins.push(SampleOrigin { split: kind, index });
            }
        }
    }
    Ok(out)
}
