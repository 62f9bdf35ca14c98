//! Frame-wise feed-forward phone classifier used as the aligner.

use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::{add_deltas, mel_spectrogram, mfcc, FrameConfig};
use crate::error::{Error, Result};

use super::ctc::{ctc_logit_gradient, log_softmax};
use super::PhoneInventory;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// How audio is turned into classifier input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub n_mels: usize,
    pub n_mfcc: usize,
    /// Regression half-width for delta features; 0 disables them.
    pub delta_width: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            n_mels: 40,
            n_mfcc: 13,
            delta_width: 0,
        }
    }
}

impl FeatureConfig {
    pub fn dim(&self) -> usize {
        if self.delta_width > 0 {
            2 * self.n_mfcc
        } else {
            self.n_mfcc
        }
    }

    /// MFCC(+delta) frames standardized per utterance (zero mean, unit variance per column).
    pub fn extract(&self, audio: &AudioBuffer, frames: &FrameConfig) -> Result<Array2<f64>> {
        let spec = mel_spectrogram(audio, frames, self.n_mels)?;
        let mut feats = add_deltas(&mfcc(&spec, self.n_mfcc)?, self.delta_width);
        crate::dsp::standardize(&mut feats);
        Ok(feats)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) struct Dense {
    /// `inputs x outputs`
    pub(crate) weights: Array2<f64>,
    pub(crate) bias: Array1<f64>,
}

impl Dense {
    fn init(inputs: usize, outputs: usize, rng: &mut impl Rng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        Self {
            weights: Array2::from_shape_fn((inputs, outputs), |_| rng.gen_range(-limit..limit)),
            bias: Array1::zeros(outputs),
        }
    }
}

/// Per-layer parameter gradients, same shapes as the model's layers.
pub(crate) type Gradients = Vec<(Array2<f64>, Array1<f64>)>;

/// MFCC frames -> tanh hidden layers -> log-softmax over `blank + phones`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignerModel {
    pub version: u32,
    pub inventory: PhoneInventory,
    pub features: FeatureConfig,
    pub(crate) layers: Vec<Dense>,
}

impl AlignerModel {
    /// Randomly initialized model (Glorot-uniform weights, zero biases).
    pub fn new(
        inventory: PhoneInventory,
        features: FeatureConfig,
        hidden: &[usize],
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if hidden.contains(&0) {
            return Err(Error::invalid("hidden layer widths must be positive"));
        }
        let mut sizes = vec![features.dim()];
        sizes.extend_from_slice(hidden);
        sizes.push(inventory.n_classes());
        let layers = sizes
            .windows(2)
            .map(|w| Dense::init(w[0], w[1], rng))
            .collect();
        Ok(Self {
            version: MODEL_FORMAT_VERSION,
            inventory,
            features,
            layers,
        })
    }

    /// `[input, hidden..., output]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.layers[0].weights.nrows()];
        sizes.extend(self.layers.iter().map(|l| l.weights.ncols()));
        sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    fn check_input(&self, features: &Array2<f64>) -> Result<()> {
        if features.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: features.ncols(),
            });
        }
        if features.nrows() == 0 {
            return Err(Error::invalid("feature matrix has no frames"));
        }
        Ok(())
    }

    /// Activations of every layer; the last entry is the log-softmax output.
    fn forward_all(&self, features: &Array2<f64>) -> Vec<Array2<f64>> {
        let mut acts = vec![features.clone()];
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let z = acts[i].dot(&layer.weights) + &layer.bias;
            acts.push(if i == last {
                log_softmax(&z)
            } else {
                z.mapv(f64::tanh)
            });
        }
        acts
    }

    /// `T x (|inventory| + 1)` log-posteriors.
    pub fn log_posteriors(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_input(features)?;
        Ok(self
            .forward_all(features)
            .pop()
            .expect("at least one layer"))
    }

    /// CTC loss of one utterance.
    pub fn loss(&self, features: &Array2<f64>, target: &[usize]) -> Result<f64> {
        let lp = self.log_posteriors(features)?;
        super::ctc::ctc_loss(lp.view(), target, PhoneInventory::BLANK)
    }

    /// CTC loss and parameter gradients by backpropagation.
    pub(crate) fn loss_and_gradients(
        &self,
        features: &Array2<f64>,
        target: &[usize],
    ) -> Result<(f64, Gradients)> {
        self.check_input(features)?;
        let acts = self.forward_all(features);
        let (loss, mut delta) =
            ctc_logit_gradient(&acts[acts.len() - 1], target, PhoneInventory::BLANK)?;
        let mut grads: Gradients = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let input = &acts[i];
            grads.push((input.t().dot(&delta), delta.sum_axis(Axis(0))));
            if i > 0 {
                let back = delta.dot(&layer.weights.t());
                delta = back * input.mapv(|h| 1.0 - h * h);
            }
        }
        grads.reverse();
        Ok((loss, grads))
    }

    /// In-place `params -= step * grads`.
    pub(crate) fn apply(&mut self, grads: &Gradients, step: f64) {
        for (layer, (gw, gb)) in self.layers.iter_mut().zip(grads) {
            layer.weights.scaled_add(-step, gw);
            layer.bias.scaled_add(-step, gb);
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            version: u32,
        }
        let probe: Probe = serde_json::from_str(text)?;
        if probe.version != MODEL_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: MODEL_FORMAT_VERSION,
                found: probe.version,
            });
        }
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::invalid("model has no layers"));
        }
        if self.input_dim() != self.features.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.features.dim(),
                found: self.input_dim(),
            });
        }
        for pair in self.layers.windows(2) {
            if pair[0].weights.ncols() != pair[1].weights.nrows() {
                return Err(Error::invalid("consecutive layer shapes do not chain"));
            }
        }
        for l in &self.layers {
            if l.bias.len() != l.weights.ncols() {
                return Err(Error::invalid("bias length does not match layer width"));
            }
        }
        let out = self.layers[self.layers.len() - 1].weights.ncols();
        if out != self.inventory.n_classes() {
            return Err(Error::DimensionMismatch {
                expected: self.inventory.n_classes(),
                found: out,
            });
        }
        if !self.is_finite() {
            return Err(Error::invalid("model weights are not finite"));
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
