//! Five-layer perceptrons for tabular classification.
//!
//! `MLP-5` stacks five fully connected layers (four rectified hidden layers
//! of width 100 and a class-logit head). `ResMLP-5` adds an identity skip
//! around every hidden layer whose input and output widths agree.
//!
//! Model files: magic `MLPW1`, architecture id (`u8`), training seed
//! (`u64`), layer count (`u32`), then per layer its input and output widths
//! (`u32` each) followed by the row-major `in × out` weights and the `out`
//! biases, all little-endian `f64`.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::data::TabularDataset;
use crate::error::{Error, Result};
use crate::lattice::ValueFunction;
use crate::value::{log_odds, rest_mass};

pub const MODEL_MAGIC: &[u8; 5] = b"MLPW1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "mlp5", alias = "MLP-5")]
    Mlp5,
    #[serde(rename = "resmlp5", alias = "ResMLP-5")]
    ResMlp5,
}

impl Architecture {
    pub const LAYERS: usize = 5;

    fn id(self) -> u8 {
        match self {
            Architecture::Mlp5 => 1,
            Architecture::ResMlp5 => 2,
        }
    }

    fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Architecture::Mlp5),
            2 => Ok(Architecture::ResMlp5),
            other => Err(Error::ModelFormat(format!("unknown architecture id {other}"))),
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Architecture::Mlp5 => "mlp5",
            Architecture::ResMlp5 => "resmlp5",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::Mlp5 => "MLP-5",
            Architecture::ResMlp5 => "ResMLP-5",
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "mlp5" => Ok(Architecture::Mlp5),
            "resmlp5" => Ok(Architecture::ResMlp5),
            _ => Err(Error::Config(format!("unknown architecture {s:?}"))),
        }
    }
}

/// Optimizer settings. Adam with the usual moment decay rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub hidden_width: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 64,
            epochs: 200,
            hidden_width: 100,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// One fully connected layer; `weights` is `in × out`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    architecture: Architecture,
    layers: Vec<Dense>,
    seed: u64,
}

struct Trace {
    /// Layer inputs; `acts[0]` is the batch itself.
    acts: Vec<Array2<f64>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Array2<f64>>,
    logits: Array2<f64>,
}

impl MlpModel {
    /// He-initialized network with zero biases.
    pub fn new(architecture: Architecture, inputs: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut widths = vec![inputs];
        widths.extend(std::iter::repeat_n(hidden, Architecture::LAYERS - 1));
        widths.push(classes);
        let layers = widths
            .windows(2)
            .map(|w| {
                let normal = Normal::new(0.0, (2.0 / w[0] as f64).sqrt()).expect("valid normal");
                Dense {
                    weights: Array2::from_shape_fn((w[0], w[1]), |_| rng.sample(normal)),
                    bias: Array1::zeros(w[1]),
                }
            })
            .collect();
        Self {
            architecture,
            layers,
            seed,
        }
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn classes(&self) -> usize {
        self.layers[self.layers.len() - 1].weights.ncols()
    }

    fn residual(&self, layer: usize) -> bool {
        let w = &self.layers[layer].weights;
        self.architecture == Architecture::ResMlp5 && w.nrows() == w.ncols()
    }

    fn trace(&self, x: ArrayView2<f64>) -> Trace {
        let last = self.layers.len() - 1;
        let mut acts = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(last);
        for (l, layer) in self.layers[..last].iter().enumerate() {
            let z = acts[l].dot(&layer.weights) + &layer.bias;
            let mut a = z.mapv(|v| v.max(0.0));
            if self.residual(l) {
                a += &acts[l];
            }
            pre.push(z);
            acts.push(a);
        }
        let head = &self.layers[last];
        let logits = acts[last].dot(&head.weights) + &head.bias;
        Trace { acts, pre, logits }
    }

    /// Class logits for a batch of rows.
    pub fn logits(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let last = self.layers.len() - 1;
        let mut a = x.to_owned();
        for (l, layer) in self.layers[..last].iter().enumerate() {
            let mut next = a.dot(&layer.weights) + &layer.bias;
            next.mapv_inplace(|v| v.max(0.0));
            if self.residual(l) {
                next += &a;
            }
            a = next;
        }
        a.dot(&self.layers[last].weights) + &self.layers[last].bias
    }

    /// Row-wise softmax probabilities.
    pub fn probabilities(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let mut logits = self.logits(x);
        softmax_rows(&mut logits);
        logits
    }

    /// Mean cross-entropy of a batch and its parameter gradients.
    pub fn loss_and_gradients(&self, x: ArrayView2<f64>, labels: &[usize]) -> (f64, Vec<Dense>) {
        let trace = self.trace(x);
        let batch = labels.len() as f64;
        let mut probs = trace.logits.clone();
        softmax_rows(&mut probs);
        let mut loss = 0.0;
        for (row, &y) in labels.iter().enumerate() {
            loss -= probs[[row, y]].max(f64::MIN_POSITIVE).ln();
            probs[[row, y]] -= 1.0;
        }
        let mut delta = probs / batch;
        let last = self.layers.len() - 1;
        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        grads.push(Dense {
            weights: trace.acts[last].t().dot(&delta),
            bias: delta.sum_axis(Axis(0)),
        });
        let mut upstream = delta.dot(&self.layers[last].weights.t());
        for l in (0..last).rev() {
            delta = &upstream * &trace.pre[l].mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
            grads.push(Dense {
                weights: trace.acts[l].t().dot(&delta),
                bias: delta.sum_axis(Axis(0)),
            });
            let mut next = delta.dot(&self.layers[l].weights.t());
            if self.residual(l) {
                next += &upstream;
            }
            upstream = next;
        }
        grads.reverse();
        (loss / batch, grads)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        w.write_all(&[self.architecture.id()])?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for layer in &self.layers {
            let (i, o) = layer.weights.dim();
            w.write_all(&(i as u32).to_le_bytes())?;
            w.write_all(&(o as u32).to_le_bytes())?;
            for v in layer.weights.iter().chain(layer.bias.iter()) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file))
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 5];
        fill(&mut r, &mut magic, "header")?;
        if &magic != MODEL_MAGIC {
            if &magic[..4] == b"MLPW" {
                return Err(Error::VersionMismatch {
                    found: String::from_utf8_lossy(&magic).into_owned(),
                });
            }
            return Err(Error::ModelFormat("not a model file".into()));
        }
        let mut id = [0u8; 1];
        fill(&mut r, &mut id, "header")?;
        let architecture = Architecture::from_id(id[0])?;
        let seed = u64::from_le_bytes(read_array(&mut r, "header")?);
        let count = u32::from_le_bytes(read_array(&mut r, "header")?) as usize;
        if count != Architecture::LAYERS {
            return Err(Error::ModelFormat(format!("expected 5 layers, found {count}")));
        }
        let mut layers = Vec::with_capacity(count);
        let mut prev: Option<usize> = None;
        for _ in 0..count {
            let i = u32::from_le_bytes(read_array(&mut r, "layer shape")?) as usize;
            let o = u32::from_le_bytes(read_array(&mut r, "layer shape")?) as usize;
            if i == 0 || o == 0 || i > 1 << 16 || o > 1 << 16 || prev.is_some_and(|p| p != i) {
                return Err(Error::ModelFormat(format!("inconsistent layer shape {i}x{o}")));
            }
            prev = Some(o);
            let mut layer = Dense::zeros(i, o);
            for v in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *v = f64::from_le_bytes(read_array(&mut r, "weights")?);
            }
            layers.push(layer);
        }
        Ok(Self {
            architecture,
            layers,
            seed,
        })
    }
}

fn fill<R: Read>(r: &mut R, buf: &mut [u8], what: &'static str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Truncated(what),
        _ => Error::io("<model>", e),
    })
}

fn read_array<R: Read, const N: usize>(r: &mut R, what: &'static str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    fill(r, &mut buf, what)?;
    Ok(buf)
}

fn softmax_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
}

/// Softmax class probabilities for one sample.
pub fn predict_probabilities(model: &MlpModel, sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            actual: sample.len(),
        });
    }
    let x = ArrayView2::from_shape((1, sample.len()), sample).expect("row shape");
    Ok(model.probabilities(x).into_raw_vec_and_offset().0)
}

fn to_matrix(rows: &[Vec<f64>]) -> Array2<f64> {
    let d = rows.first().map_or(0, Vec::len);
    Array2::from_shape_fn((rows.len(), d), |(i, j)| rows[i][j])
}

/// Fraction of rows whose arg-max logit equals the label.
pub fn accuracy(model: &MlpModel, features: &[Vec<f64>], labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let logits = model.logits(to_matrix(features).view());
    let correct = logits
        .rows()
        .into_iter()
        .zip(labels)
        .filter(|(row, &y)| {
            let best = row
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
            best.0 == y
        })
        .count();
    correct as f64 / labels.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    pub architecture: Architecture,
    pub seed: u64,
    pub epochs: usize,
    pub final_loss: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    #[serde(skip)]
    pub seconds: f64,
}

struct Adam {
    m: Vec<Dense>,
    v: Vec<Dense>,
    step: i32,
}

impl Adam {
    fn new(model: &MlpModel) -> Self {
        let zeros = || {
            model
                .layers
                .iter()
                .map(|l| Dense::zeros(l.weights.nrows(), l.weights.ncols()))
                .collect()
        };
        Self {
            m: zeros(),
            v: zeros(),
            step: 0,
        }
    }

    fn update(&mut self, model: &mut MlpModel, grads: &[Dense], hp: &HyperParams) {
        self.step += 1;
        let c1 = 1.0 - hp.beta1.powi(self.step);
        let c2 = 1.0 - hp.beta2.powi(self.step);
        let lr = hp.learning_rate;
        for (((p, g), m), v) in model
            .layers
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            let params = p.weights.iter_mut().chain(p.bias.iter_mut());
            let gs = g.weights.iter().chain(g.bias.iter());
            let ms = m.weights.iter_mut().chain(m.bias.iter_mut());
            let vs = v.weights.iter_mut().chain(v.bias.iter_mut());
            for (((w, &g), m), v) in params.zip(gs).zip(ms).zip(vs) {
                *m = hp.beta1 * *m + (1.0 - hp.beta1) * g;
                *v = hp.beta2 * *v + (1.0 - hp.beta2) * g * g;
                *w -= lr * (*m / c1) / ((*v / c2).sqrt() + hp.epsilon);
            }
        }
    }
}

/// Mini-batch Adam on mean cross-entropy; deterministic given `seed`.
pub fn train_mlp(
    ds: &TabularDataset,
    architecture: Architecture,
    hp: &HyperParams,
    seed: u64,
) -> Result<(MlpModel, TrainReport)> {
    if ds.normalization().is_none() {
        return Err(Error::NotNormalized);
    }
    if ds.train.is_empty() {
        return Err(Error::Empty("training split"));
    }
    if hp.batch_size == 0 || hp.hidden_width == 0 {
        return Err(Error::InvalidParameter("batch size and width must be positive".into()));
    }
    let start = Instant::now();
    let mut model = MlpModel::new(architecture, ds.n_features(), hp.hidden_width, ds.n_classes(), seed);
    let mut adam = Adam::new(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005E_ED0F_BA7C);
    let x = to_matrix(&ds.train.features);
    let y = &ds.train.labels;
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut final_loss = f64::NAN;
    for epoch in 0..hp.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(hp.batch_size) {
            let batch = x.select(Axis(0), chunk);
            let labels: Vec<usize> = chunk.iter().map(|&i| y[i]).collect();
            let (loss, grads) = model.loss_and_gradients(batch.view(), &labels);
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            total += loss * chunk.len() as f64;
            adam.update(&mut model, &grads, hp);
        }
        final_loss = total / y.len() as f64;
    }
    let report = TrainReport {
        architecture,
        seed,
        epochs: hp.epochs,
        final_loss,
        train_accuracy: accuracy(&model, &ds.train.features, &ds.train.labels),
        test_accuracy: accuracy(&model, &ds.test.features, &ds.test.labels),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

/// Log-odds of the truth class under a trained model.
#[derive(Clone, Copy, Debug)]
pub struct ModelValue<'a> {
    pub model: &'a MlpModel,
    pub truth: usize,
}

impl<'a> ModelValue<'a> {
    pub fn new(model: &'a MlpModel, truth: usize) -> Result<Self> {
        if truth >= model.classes() {
            return Err(Error::InvalidLabel {
                label: truth,
                classes: model.classes(),
            });
        }
        Ok(Self { model, truth })
    }
}

impl ValueFunction for ModelValue<'_> {
    fn evaluate(&self, input: &[f64]) -> f64 {
        let mut out = [0.0];
        self.evaluate_batch(input, input.len(), &mut out);
        out[0]
    }

    fn evaluate_batch(&self, inputs: &[f64], dim: usize, out: &mut [f64]) {
        let x = ArrayView2::from_shape((out.len(), dim), inputs).expect("batch shape");
        let probs = self.model.probabilities(x);
        for (slot, row) in out.iter_mut().zip(probs.rows()) {
            let row = row.as_slice().expect("contiguous row");
            *slot = log_odds(row[self.truth], rest_mass(row, self.truth));
        }
    }

    fn is_reentrant(&self) -> bool {
        true
    }
}
