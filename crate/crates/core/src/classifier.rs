//! One-hidden-layer feed-forward classification head.
//!
//! `input → dense(hidden, ReLU) → dropout → dense(n_classes) → softmax`,
//! trained on cross-entropy with Adam and early stopping on a stratified
//! validation split. Defaults: 1500 hidden units, dropout 0.2, batch 16,
//! at most 50 epochs.

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Label, Mode};
use crate::error::{Error, Result};

pub const DEFAULT_HIDDEN_UNITS: usize = 1500;
pub const DEFAULT_DROPOUT: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct MLPModel {
    pub input_dim: usize,
    pub hidden_units: usize,
    pub n_classes: usize,
    /// `hidden_units × input_dim`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `n_classes × hidden_units`, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub dropout_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub patience: usize,
    pub min_delta: f64,
    pub val_fraction: f64,
    /// Inverse-frequency class weights in the loss.
    pub class_weighting: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 50,
            batch_size: 16,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            patience: 5,
            min_delta: 1e-4,
            val_fraction: 0.1,
            class_weighting: false,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.val_fraction > 0.0 && self.val_fraction < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "val_fraction must lie in (0, 0.5), got {}",
                self.val_fraction
            )));
        }
        if self.batch_size == 0 || self.patience == 0 {
            return Err(Error::InvalidArgument("batch_size and patience must be positive".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("learning_rate must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub initial_train_loss: f64,
    pub initial_val_loss: f64,
    pub train_loss_history: Vec<f64>,
    pub val_loss_history: Vec<f64>,
    pub stopped_early: bool,
    /// 1-based epoch whose weights were kept; 0 when no epoch ran.
    pub best_epoch: usize,
}

/// Class order for a model with `n_classes` outputs.
pub fn classes_for(n_classes: usize) -> &'static [Label] {
    if n_classes == 2 {
        Mode::Cn.classes()
    } else {
        Mode::Cdn.classes()
    }
}

fn glorot(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> Vec<f64> {
    let limit = glorot_limit(fan_in, fan_out);
    (0..fan_in * fan_out).map(|_| rng.gen_range(-limit..=limit)).collect()
}

pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Glorot-uniform weights, zero biases.
pub fn init_model(input_dim: usize, hidden_units: usize, n_classes: usize, seed: u64) -> Result<MLPModel> {
    if input_dim == 0 || hidden_units == 0 {
        return Err(Error::InvalidArgument("model dimensions must be positive".into()));
    }
    if !(n_classes == 2 || n_classes == 3) {
        return Err(Error::InvalidArgument(format!("n_classes must be 2 or 3, got {n_classes}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w1 = glorot(&mut rng, input_dim, hidden_units);
    let w2 = glorot(&mut rng, hidden_units, n_classes);
    Ok(MLPModel {
        input_dim,
        hidden_units,
        n_classes,
        w1,
        b1: vec![0.0; hidden_units],
        w2,
        b2: vec![0.0; n_classes],
        dropout_rate: DEFAULT_DROPOUT,
        seed,
    })
}

/// Inputs per block in batched inference.
const BLOCK: usize = 32;

/// Intermediate values of one forward pass, kept for backprop.
struct Trace {
    pre: Vec<f64>,
    /// Post-ReLU, post-dropout hidden activations.
    hidden: Vec<f64>,
    /// Dropout multiplier per hidden unit (0 or 1/(1−rate)); 1 at inference.
    keep: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Clone)]
struct Grads {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl Grads {
    fn zeros(m: &MLPModel) -> Self {
        Grads {
            w1: vec![0.0; m.w1.len()],
            b1: vec![0.0; m.b1.len()],
            w2: vec![0.0; m.w2.len()],
            b2: vec![0.0; m.b2.len()],
        }
    }

    fn parts(&self) -> [&Vec<f64>; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    fn parts_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}

fn softmax(logits: &mut [f64]) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for z in logits.iter_mut() {
        *z = (*z - max).exp();
        sum += *z;
    }
    for z in logits.iter_mut() {
        *z /= sum;
    }
}

impl MLPModel {
    pub fn classes(&self) -> &'static [Label] {
        classes_for(self.n_classes)
    }

    pub fn n_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    fn parts_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                id: "input".into(),
                expected: self.input_dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Forward passes over a block of inputs. The first layer walks the
    /// weight matrix once per block, so each row stays in cache while it is
    /// applied to every input. Dropout masks are drawn input by input.
    fn traces(&self, xs: &[&[f64]], mut rng: Option<&mut ChaCha8Rng>) -> Vec<Trace> {
        let (h, d) = (self.hidden_units, self.input_dim);
        let n = xs.len();
        let x: Vec<f64> = xs.iter().flat_map(|x| x.iter().copied()).collect();
        let mut z: Vec<f64> = (0..n).flat_map(|_| self.b1.iter().copied()).collect();
        // z (n×h) += x (n×d) · w1ᵀ (d×h)
        // SAFETY: strides describe buffers of exactly n·d, h·d and n·h elements.
        unsafe {
            matrixmultiply::dgemm(
                n, d, h, 1.0,
                x.as_ptr(), d as isize, 1,
                self.w1.as_ptr(), 1, d as isize,
                1.0,
                z.as_mut_ptr(), h as isize, 1,
            );
        }
        z.chunks(h)
            .take(n)
            .map(|pre| {
                let pre = pre.to_vec();
                let mut keep = vec![1.0; h];
                if let Some(rng) = rng.as_deref_mut() {
                    if self.dropout_rate > 0.0 {
                        let scale = 1.0 / (1.0 - self.dropout_rate);
                        for k in keep.iter_mut() {
                            *k = if rng.gen::<f64>() < self.dropout_rate { 0.0 } else { scale };
                        }
                    }
                }
                let hidden: Vec<f64> = pre.iter().zip(&keep).map(|(&z, &k)| z.max(0.0) * k).collect();
                let mut probs = self.b2.clone();
                for (c, p) in probs.iter_mut().enumerate() {
                    let row = &self.w2[c * h..(c + 1) * h];
                    *p += row.iter().zip(&hidden).map(|(w, a)| w * a).sum::<f64>();
                }
                softmax(&mut probs);
                Trace {
                    pre,
                    hidden,
                    keep,
                    probs,
                }
            })
            .collect()
    }

    fn trace(&self, x: &[f64], rng: Option<&mut ChaCha8Rng>) -> Trace {
        self.traces(&[x], rng).pop().expect("one trace per input")
    }

    /// Class probabilities at inference (no dropout).
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.trace(x, None).probs)
    }

    /// Class probabilities with inverted dropout on the hidden layer.
    pub fn forward_training(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.trace(x, Some(rng)).probs)
    }

    /// Adds `weights[i] ·` ∂CE/∂θ for every example of a block to `g`.
    fn backprop(&self, xs: &[&[f64]], traces: &[Trace], targets: &[usize], weights: &[f64], g: &mut Grads) {
        let (h, d) = (self.hidden_units, self.input_dim);
        let n = xs.len();
        let mut dpre = vec![0.0; n * h];
        for (s, t) in traces.iter().enumerate() {
            let mut dhidden = vec![0.0; h];
            for c in 0..self.n_classes {
                let dz = weights[s] * (t.probs[c] - if c == targets[s] { 1.0 } else { 0.0 });
                g.b2[c] += dz;
                let row = &self.w2[c * h..(c + 1) * h];
                let grow = &mut g.w2[c * h..(c + 1) * h];
                for j in 0..h {
                    grow[j] += dz * t.hidden[j];
                    dhidden[j] += dz * row[j];
                }
            }
            for j in 0..h {
                if t.pre[j] > 0.0 && t.keep[j] != 0.0 {
                    dpre[s * h + j] = dhidden[j] * t.keep[j];
                    g.b1[j] += dpre[s * h + j];
                }
            }
        }
        let x: Vec<f64> = xs.iter().flat_map(|x| x.iter().copied()).collect();
        // g.w1 (h×d) += dpreᵀ (h×n) · x (n×d)
        // SAFETY: strides describe buffers of exactly n·h, n·d and h·d elements.
        unsafe {
            matrixmultiply::dgemm(
                h, n, d, 1.0,
                dpre.as_ptr(), 1, h as isize,
                x.as_ptr(), d as isize, 1,
                1.0,
                g.w1.as_mut_ptr(), d as isize, 1,
            );
        }
    }

    fn loss(&self, x: &[f64], target: usize) -> f64 {
        -self.trace(x, None).probs[target].max(f64::MIN_POSITIVE).ln()
    }

    fn mean_loss(&self, xs: &[&[f64]], ys: &[usize], weights: &[f64]) -> f64 {
        if xs.is_empty() {
            return f64::NAN;
        }
        let mut total = 0.0;
        for (xb, yb) in xs.chunks(BLOCK).zip(ys.chunks(BLOCK)) {
            for (t, &y) in self.traces(xb, None).iter().zip(yb) {
                total += weights[y] * -t.probs[y].max(f64::MIN_POSITIVE).ln();
            }
        }
        total / xs.len() as f64
    }

    /// Predicted label (argmax, ties to the lowest class index) and
    /// probabilities per input.
    pub fn predict<X: AsRef<[f64]>>(&self, features: &[X]) -> Result<Vec<(Label, Vec<f64>)>> {
        let xs: Vec<&[f64]> = features.iter().map(AsRef::as_ref).collect();
        for x in &xs {
            self.check_input(x)?;
        }
        Ok(xs
            .chunks(BLOCK)
            .flat_map(|xb| self.traces(xb, None))
            .map(|t| (self.classes()[argmax(&t.probs)], t.probs))
            .collect())
    }
}

/// Index of the largest value; the first one wins on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn class_index(model: &MLPModel, label: Label) -> Result<usize> {
    model
        .classes()
        .iter()
        .position(|&c| c == label)
        .ok_or_else(|| Error::LabelNotInMode(label.to_string()))
}

/// Per class: round(`fraction` · count) examples, at least one when the class
/// has two or more members, never the whole class.
fn stratified_holdout(ys: &[usize], n_classes: usize, fraction: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..ys.len()).filter(|&i| ys[i] == c).collect();
        idx.shuffle(rng);
        let n = idx.len();
        let n_val = if n >= 2 {
            ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
        } else {
            0
        };
        val.extend_from_slice(&idx[..n_val]);
        train.extend_from_slice(&idx[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

struct Adam {
    m: Grads,
    v: Grads,
    step: i32,
}

impl Adam {
    fn new(model: &MLPModel) -> Self {
        Adam {
            m: Grads::zeros(model),
            v: Grads::zeros(model),
            step: 0,
        }
    }

    fn update(&mut self, model: &mut MLPModel, g: &Grads, cfg: &TrainConfig) {
        const EPS: f64 = 1e-8;
        self.step += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.step);
        let c2 = 1.0 - cfg.beta2.powi(self.step);
        let params = model.parts_mut();
        let ms = self.m.parts_mut();
        let vs = self.v.parts_mut();
        for (((p, m), v), g) in params.into_iter().zip(ms).zip(vs).zip(g.parts()) {
            for (((p, m), v), &g) in p.iter_mut().zip(m.iter_mut()).zip(v.iter_mut()).zip(g.iter()) {
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
                *p -= cfg.learning_rate * (*m / c1) / ((*v / c2).sqrt() + EPS);
            }
        }
    }
}

/// Mini-batch training with early stopping on validation loss.
///
/// A stratified `val_fraction` of the data is held out. After each epoch the
/// loss over the training and validation parts is measured without dropout.
/// An epoch counts as an improvement when validation loss drops by more than
/// `min_delta` below the best so far; training stops once `patience`
/// consecutive epochs fail to improve, and the best epoch's weights are
/// returned. With a flat validation loss training therefore runs exactly
/// `patience + 1` epochs.
pub fn train<X: AsRef<[f64]>>(
    model: MLPModel,
    features: &[X],
    labels: &[Label],
    cfg: &TrainConfig,
) -> Result<(MLPModel, TrainReport)> {
    cfg.validate()?;
    if features.is_empty() {
        return Err(Error::EmptyData);
    }
    if features.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let xs: Vec<&[f64]> = features.iter().map(AsRef::as_ref).collect();
    for x in &xs {
        model.check_input(x)?;
    }
    let ys: Vec<usize> = labels.iter().map(|&l| class_index(&model, l)).collect::<Result<_>>()?;
    let mut counts = vec![0usize; model.n_classes];
    for &y in &ys {
        counts[y] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleClass);
    }
    let weights: Vec<f64> = if cfg.class_weighting {
        let present = counts.iter().filter(|&&c| c > 0).count() as f64;
        counts
            .iter()
            .map(|&c| if c == 0 { 0.0 } else { ys.len() as f64 / (present * c as f64) })
            .collect()
    } else {
        vec![1.0; model.n_classes]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (train_idx, val_idx) = stratified_holdout(&ys, model.n_classes, cfg.val_fraction, &mut rng);
    let subset = |idx: &[usize]| -> (Vec<&[f64]>, Vec<usize>) {
        (idx.iter().map(|&i| xs[i]).collect(), idx.iter().map(|&i| ys[i]).collect())
    };
    let (tx, ty) = subset(&train_idx);
    let (vx, vy) = subset(&val_idx);
    let monitor = |m: &MLPModel| -> (f64, f64) {
        let tl = m.mean_loss(&tx, &ty, &weights);
        // tiny sets can leave the validation part empty; fall back to training loss
        let vl = if vx.is_empty() { tl } else { m.mean_loss(&vx, &vy, &weights) };
        (tl, vl)
    };

    let (initial_train_loss, initial_val_loss) = monitor(&model);
    let mut report = TrainReport {
        epochs_run: 0,
        initial_train_loss,
        initial_val_loss,
        train_loss_history: Vec::new(),
        val_loss_history: Vec::new(),
        stopped_early: false,
        best_epoch: 0,
    };
    let mut model = model;
    let mut best = model.clone();
    let mut best_val = f64::INFINITY;
    let mut stale = 0usize;
    let mut adam = Adam::new(&model);
    let mut order: Vec<usize> = (0..tx.len()).collect();
    let mut grads = Grads::zeros(&model);

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            grads.parts_mut().into_iter().for_each(|g| g.fill(0.0));
            let scale = 1.0 / batch.len() as f64;
            let bx: Vec<&[f64]> = batch.iter().map(|&i| tx[i]).collect();
            let by: Vec<usize> = batch.iter().map(|&i| ty[i]).collect();
            let bw: Vec<f64> = by.iter().map(|&y| scale * weights[y]).collect();
            let traces = model.traces(&bx, Some(&mut rng));
            model.backprop(&bx, &traces, &by, &bw, &mut grads);
            adam.update(&mut model, &grads, cfg);
        }
        let (tl, vl) = monitor(&model);
        report.train_loss_history.push(tl);
        report.val_loss_history.push(vl);
        report.epochs_run = epoch;
        if vl < best_val - cfg.min_delta {
            best_val = vl;
            best = model.clone();
            report.best_epoch = epoch;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                report.stopped_early = epoch < cfg.max_epochs;
                break;
            }
        }
    }
    if report.epochs_run == 0 {
        return Ok((model, report));
    }
    Ok((best, report))
}

/// |a − n| / max(|a|, |n|, 1e-12).
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-12)
}

/// Analytic cross-entropy gradient for one example, flattened in the order
/// `w1, b1, w2, b2`.
pub fn analytic_gradient(model: &MLPModel, x: &[f64], label: Label) -> Result<Vec<f64>> {
    model.check_input(x)?;
    let target = class_index(model, label)?;
    let t = model.trace(x, None);
    let mut g = Grads::zeros(model);
    model.backprop(&[x], &[t], &[target], &[1.0], &mut g);
    Ok(g.parts().into_iter().flatten().copied().collect())
}

fn param_mut(model: &mut MLPModel, mut index: usize) -> &mut f64 {
    for part in model.parts_mut() {
        if index < part.len() {
            return &mut part[index];
        }
        index -= part.len();
    }
    panic!("parameter index out of range");
}

/// Central finite difference of the loss with respect to parameter `index`.
pub fn numeric_gradient(model: &MLPModel, x: &[f64], label: Label, index: usize, epsilon: f64) -> Result<f64> {
    let target = class_index(model, label)?;
    let mut m = model.clone();
    let orig = *param_mut(&mut m, index);
    *param_mut(&mut m, index) = orig + epsilon;
    let plus = m.loss(x, target);
    *param_mut(&mut m, index) = orig - epsilon;
    let minus = m.loss(x, target);
    Ok((plus - minus) / (2.0 * epsilon))
}

/// Largest relative error between backprop and central differences over a
/// random sample of at least 100 parameters (all of them for small models).
/// Dropout is not applied.
pub fn gradient_check(model: &MLPModel, x: &[f64], label: Label, epsilon: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside [1e-7, 1e-3]")));
    }
    let analytic = analytic_gradient(model, x, label)?;
    let n = model.n_params();
    let sample = n.min(100.max(n / 20));
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed ^ 0x9e37_79b9_7f4a_7c15);
    idx.shuffle(&mut rng);
    let mut worst = 0.0f64;
    for &i in &idx[..sample] {
        let numeric = numeric_gradient(model, x, label, i, epsilon)?;
        worst = worst.max(relative_error(analytic[i], numeric));
    }
    Ok(worst)
}

#[derive(Serialize, Deserialize)]
struct Dims {
    input_dim: usize,
    hidden_units: usize,
    n_classes: usize,
}

#[derive(Serialize, Deserialize)]
struct EncodedWeights {
    w1: String,
    b1: String,
    w2: String,
    b2: String,
}

#[derive(Serialize, Deserialize)]
struct ModelConfig {
    dropout_rate: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: serde_json::Value,
    dims: Dims,
    weights: EncodedWeights,
    config: ModelConfig,
}

fn encode(values: &[f64]) -> String {
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    B64.encode(bytes)
}

fn decode(name: &str, s: &str, expected: usize) -> Result<Vec<f64>> {
    let bytes = B64
        .decode(s)
        .map_err(|e| Error::Corrupt(format!("{name}: {e}")))?;
    if bytes.len() != expected * 8 {
        return Err(Error::Corrupt(format!(
            "{name}: {} bytes, expected {}",
            bytes.len(),
            expected * 8
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Corrupt(format!("{name}: non-finite weight")));
    }
    Ok(values)
}

pub fn to_json(model: &MLPModel) -> Result<String> {
    let file = ModelFile {
        version: serde_json::Value::from(1),
        dims: Dims {
            input_dim: model.input_dim,
            hidden_units: model.hidden_units,
            n_classes: model.n_classes,
        },
        weights: EncodedWeights {
            w1: encode(&model.w1),
            b1: encode(&model.b1),
            w2: encode(&model.w2),
            b2: encode(&model.b2),
        },
        config: ModelConfig {
            dropout_rate: model.dropout_rate,
            seed: model.seed,
        },
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn from_json(body: &str) -> Result<MLPModel> {
    let file: ModelFile = serde_json::from_str(body).map_err(|e| Error::Corrupt(e.to_string()))?;
    if file.version.as_u64() != Some(1) {
        return Err(Error::Version(format!("model file version {} (expected 1)", file.version)));
    }
    let Dims {
        input_dim,
        hidden_units,
        n_classes,
    } = file.dims;
    if input_dim == 0 || hidden_units == 0 || !(n_classes == 2 || n_classes == 3) {
        return Err(Error::Corrupt("invalid dimensions".into()));
    }
    let w = &file.weights;
    Ok(MLPModel {
        input_dim,
        hidden_units,
        n_classes,
        w1: decode("w1", &w.w1, input_dim * hidden_units)?,
        b1: decode("b1", &w.b1, hidden_units)?,
        w2: decode("w2", &w.w2, hidden_units * n_classes)?,
        b2: decode("b2", &w.b2, n_classes)?,
        dropout_rate: file.config.dropout_rate,
        seed: file.config.seed,
    })
}

pub fn save_model(model: &MLPModel, path: &Path) -> Result<()> {
    fs::write(path, to_json(model)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<MLPModel> {
    from_json(&fs::read_to_string(path)?)
}
