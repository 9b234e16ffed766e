//! A one-hidden-layer tanh network with softmax cross-entropy, trained on
//! Gaussian class clusters.

use alloc::vec;
use alloc::vec::Vec;

use super::Problem;
use crate::error::{Error, Result};
use crate::param::{GradVector, ParamVector};
use crate::rng::Rng;

/// Labelled points drawn around one random center per class.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    features: usize,
    classes: usize,
    /// Row-major `samples × features`.
    inputs: Vec<f64>,
    labels: Vec<usize>,
    seed: u64,
}

/// Spread of the class centers relative to the unit within-class noise.
const CENTER_SCALE: f64 = 1.5;

impl SyntheticDataset {
    /// Labels are assigned round-robin and then shuffled, so class counts
    /// differ by at most one.
    pub fn generate(samples: usize, features: usize, classes: usize, seed: u64) -> Result<Self> {
        if samples == 0 || features == 0 {
            return Err(Error::InvalidArgument("dataset needs samples and features"));
        }
        if classes < 2 {
            return Err(Error::InvalidArgument("dataset needs at least two classes"));
        }
        let mut rng = Rng::new(seed);
        let centers: Vec<f64> = (0..classes * features)
            .map(|_| CENTER_SCALE * rng.normal())
            .collect();
        let mut labels: Vec<usize> = (0..samples).map(|i| i % classes).collect();
        rng.shuffle(&mut labels);
        let mut inputs = Vec::with_capacity(samples * features);
        for &label in &labels {
            for f in 0..features {
                inputs.push(centers[label * features + f] + rng.normal());
            }
        }
        Ok(Self {
            features,
            classes,
            inputs,
            labels,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.features..(i + 1) * self.features]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// First `⌊len·train_fraction⌋` samples for training, the rest held out.
    /// Samples are already in seed-shuffled order.
    pub fn split(&self, train_fraction: f64) -> Result<(SyntheticDataset, SyntheticDataset)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidArgument("train fraction must lie in (0, 1)"));
        }
        let cut = (self.len() as f64 * train_fraction) as usize;
        if cut == 0 || cut == self.len() {
            return Err(Error::InvalidArgument("split leaves one side empty"));
        }
        let part = |lo: usize, hi: usize| SyntheticDataset {
            features: self.features,
            classes: self.classes,
            inputs: self.inputs[lo * self.features..hi * self.features].to_vec(),
            labels: self.labels[lo..hi].to_vec(),
            seed: self.seed,
        };
        Ok((part(0, cut), part(cut, self.len())))
    }
}

/// Layer sizes `features → hidden → classes`.
///
/// Parameters are flattened as `W1 (hidden × features)`, `b1 (hidden)`,
/// `W2 (classes × hidden)`, `b2 (classes)`, all row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpModel {
    pub features: usize,
    pub hidden: usize,
    pub classes: usize,
}

/// Unflattened MLP parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

struct Layout {
    b1: usize,
    w2: usize,
    b2: usize,
    end: usize,
}

struct Activations {
    hidden: Vec<f64>,
    probs: Vec<f64>,
    loss: f64,
}

impl MlpModel {
    pub fn param_count(&self) -> usize {
        self.layout().end
    }

    fn layout(&self) -> Layout {
        let b1 = self.hidden * self.features;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.classes * self.hidden;
        Layout {
            b1,
            w2,
            b2,
            end: b2 + self.classes,
        }
    }

    pub fn unflatten(&self, w: &[f64]) -> Result<MlpParams> {
        let l = self.layout();
        if w.len() != l.end {
            return Err(Error::Dimension {
                expected: l.end,
                found: w.len(),
            });
        }
        Ok(MlpParams {
            w1: w[..l.b1].to_vec(),
            b1: w[l.b1..l.w2].to_vec(),
            w2: w[l.w2..l.b2].to_vec(),
            b2: w[l.b2..].to_vec(),
        })
    }

    pub fn flatten(&self, p: &MlpParams) -> Result<ParamVector> {
        let mut out = Vec::with_capacity(self.param_count());
        out.extend_from_slice(&p.w1);
        out.extend_from_slice(&p.b1);
        out.extend_from_slice(&p.w2);
        out.extend_from_slice(&p.b2);
        if out.len() != self.param_count() {
            return Err(Error::Dimension {
                expected: self.param_count(),
                found: out.len(),
            });
        }
        Ok(ParamVector::new(out))
    }

    /// Glorot-uniform `W1`, a small uniform `W2` (so the initial softmax is
    /// close to uniform), zero biases.
    pub fn init(&self, rng: &mut Rng) -> ParamVector {
        let l = self.layout();
        let mut w = vec![0.0; l.end];
        let limit1 = libm::sqrt(6.0 / (self.features + self.hidden) as f64);
        for x in &mut w[..l.b1] {
            *x = rng.uniform(-limit1, limit1);
        }
        let limit2 = 0.1 * libm::sqrt(6.0 / (self.hidden + self.classes) as f64);
        for x in &mut w[l.w2..l.b2] {
            *x = rng.uniform(-limit2, limit2);
        }
        w.into()
    }

    fn forward(&self, w: &[f64], x: &[f64], label: usize) -> Activations {
        let l = self.layout();
        let (w1, b1, w2, b2) = (&w[..l.b1], &w[l.b1..l.w2], &w[l.w2..l.b2], &w[l.b2..]);
        let hidden: Vec<f64> = (0..self.hidden)
            .map(|j| {
                let row = &w1[j * self.features..(j + 1) * self.features];
                let z: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b1[j];
                libm::tanh(z)
            })
            .collect();
        let logits: Vec<f64> = (0..self.classes)
            .map(|c| {
                let row = &w2[c * self.hidden..(c + 1) * self.hidden];
                row.iter().zip(&hidden).map(|(a, b)| a * b).sum::<f64>() + b2[c]
            })
            .collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|z| libm::exp(z - max)).collect();
        let total: f64 = exps.iter().sum();
        let probs: Vec<f64> = exps.iter().map(|e| e / total).collect();
        // -ln softmax_y = logsumexp - z_y
        let loss = libm::log(total) + max - logits[label];
        Activations {
            hidden,
            probs,
            loss,
        }
    }

    /// Class probabilities for one input.
    pub fn softmax(&self, w: &[f64], x: &[f64]) -> Vec<f64> {
        self.forward(w, x, 0).probs
    }

    pub fn predict(&self, w: &[f64], x: &[f64]) -> usize {
        let probs = self.softmax(w, x);
        let mut best = 0;
        for (c, p) in probs.iter().enumerate() {
            if *p > probs[best] {
                best = c;
            }
        }
        best
    }

    /// Mean cross-entropy and its gradient over `batch`.
    pub fn loss_and_grad(
        &self,
        w: &[f64],
        data: &SyntheticDataset,
        batch: &[usize],
    ) -> (f64, GradVector) {
        assert_eq!(w.len(), self.param_count());
        let l = self.layout();
        let w1_len = l.b1;
        let mut g = vec![0.0; l.end];
        let mut loss = 0.0;
        for &i in batch {
            let x = data.input(i);
            let y = data.label(i);
            let act = self.forward(w, x, y);
            loss += act.loss;
            let mut dz2 = act.probs;
            dz2[y] -= 1.0;
            let mut dhidden = vec![0.0; self.hidden];
            for c in 0..self.classes {
                for j in 0..self.hidden {
                    g[l.w2 + c * self.hidden + j] += dz2[c] * act.hidden[j];
                    dhidden[j] += w[l.w2 + c * self.hidden + j] * dz2[c];
                }
                g[l.b2 + c] += dz2[c];
            }
            for j in 0..self.hidden {
                let dz1 = dhidden[j] * (1.0 - act.hidden[j] * act.hidden[j]);
                for f in 0..self.features {
                    g[j * self.features + f] += dz1 * x[f];
                }
                g[w1_len + j] += dz1;
            }
        }
        let n = batch.len().max(1) as f64;
        g.iter_mut().for_each(|v| *v /= n);
        (loss / n, GradVector::new(g))
    }

    /// Fraction of `data` classified correctly.
    pub fn accuracy(&self, w: &[f64], data: &SyntheticDataset) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let hits = (0..data.len())
            .filter(|&i| self.predict(w, data.input(i)) == data.label(i))
            .count();
        hits as f64 / data.len() as f64
    }
}

/// An [`MlpModel`] bound to its training data, with a fixed initial point.
#[derive(Debug, Clone)]
pub struct MlpProblem {
    pub model: MlpModel,
    data: SyntheticDataset,
    all: Vec<usize>,
    initial: ParamVector,
}

impl MlpProblem {
    pub fn data(&self) -> &SyntheticDataset {
        &self.data
    }

    pub fn initial_params(&self) -> &ParamVector {
        &self.initial
    }

    pub fn accuracy(&self, w: &[f64], data: &SyntheticDataset) -> f64 {
        self.model.accuracy(w, data)
    }
}

/// Binds a fresh MLP to `dataset`, drawing the initial weights from `rng`.
pub fn make_mlp_problem(
    dataset: SyntheticDataset,
    hidden: usize,
    rng: &mut Rng,
) -> Result<MlpProblem> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("mlp needs a nonempty dataset"));
    }
    if hidden == 0 {
        return Err(Error::InvalidArgument("mlp needs at least one hidden unit"));
    }
    let model = MlpModel {
        features: dataset.features(),
        hidden,
        classes: dataset.classes(),
    };
    let initial = model.init(rng);
    let all = (0..dataset.len()).collect();
    Ok(MlpProblem {
        model,
        data: dataset,
        all,
        initial,
    })
}

impl Problem for MlpProblem {
    fn dim(&self) -> usize {
        self.model.param_count()
    }

    fn loss(&self, w: &[f64]) -> f64 {
        self.model.loss_and_grad(w, &self.data, &self.all).0
    }

    fn grad(&self, w: &[f64]) -> GradVector {
        self.model.loss_and_grad(w, &self.data, &self.all).1
    }

    fn loss_and_grad(&self, w: &[f64]) -> (f64, GradVector) {
        self.model.loss_and_grad(w, &self.data, &self.all)
    }

    fn samples(&self) -> Option<usize> {
        Some(self.data.len())
    }

    fn batch_loss_and_grad(&self, w: &[f64], batch: &[usize]) -> (f64, GradVector) {
        self.model.loss_and_grad(w, &self.data, batch)
    }
}
