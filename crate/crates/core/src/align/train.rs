//! Aligner training, per-sample finetuning and the audio-to-alignment pipeline.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::FrameConfig;
use crate::error::{Error, Result};

use super::ctc::min_frames;
use super::mas::{mas_decode, Alignment, Posteriorgram};
use super::model::{AlignerModel, FeatureConfig};
use super::{PhoneInventory, PhoneSequence};

/// One utterance's features with its transcript.
#[derive(Clone, Debug)]
pub struct TrainingSample {
    pub features: Array2<f64>,
    pub phones: PhoneSequence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub features: FeatureConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: vec![128, 128],
            learning_rate: 1e-2,
            epochs: 30,
            seed: 0,
            features: FeatureConfig::default(),
        }
    }
}

/// Mean per-utterance CTC loss before training and after every epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub initial_loss: f64,
    pub epoch_losses: Vec<f64>,
}

impl TrainReport {
    pub fn final_loss(&self) -> f64 {
        self.epoch_losses
            .last()
            .copied()
            .unwrap_or(self.initial_loss)
    }
}

struct Encoded<'a> {
    features: &'a Array2<f64>,
    target: Vec<usize>,
}

fn encode_corpus<'a>(
    corpus: &'a [TrainingSample],
    inventory: &PhoneInventory,
    dim: usize,
) -> Result<Vec<Encoded<'a>>> {
    if corpus.is_empty() {
        return Err(Error::invalid("training corpus is empty"));
    }
    corpus
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.features.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.features.ncols(),
                });
            }
            let target = inventory.encode(&s.phones)?;
            if target.is_empty() {
                return Err(Error::invalid(format!(
                    "sample {i} has an empty transcript"
                )));
            }
            let required = min_frames(&target);
            if s.features.nrows() < required {
                return Err(Error::Infeasible {
                    frames: s.features.nrows(),
                    required,
                });
            }
            Ok(Encoded {
                features: &s.features,
                target,
            })
        })
        .collect()
}

fn mean_loss(model: &AlignerModel, data: &[Encoded<'_>]) -> Result<f64> {
    let mut total = 0.0;
    for s in data {
        total += model.loss(s.features, &s.target)?;
    }
    Ok(total / data.len() as f64)
}

/// Trains a fresh aligner with per-utterance stochastic gradient descent on the CTC loss.
pub fn train_aligner(
    corpus: &[TrainingSample],
    inventory: &PhoneInventory,
    config: &TrainConfig,
) -> Result<(AlignerModel, TrainReport)> {
    let data = encode_corpus(corpus, inventory, config.features.dim())?;
    if !(config.learning_rate > 0.0) {
        return Err(Error::invalid("learning rate must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model =
        AlignerModel::new(inventory.clone(), config.features, &config.hidden, &mut rng)?;
    let initial_loss = mean_loss(&model, &data)?;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for (step, &i) in order.iter().enumerate() {
            let (loss, grads) = model.loss_and_gradients(data[i].features, &data[i].target)?;
            if !loss.is_finite() {
                return Err(Error::TrainingFailure {
                    epoch,
                    step,
                    reason: format!("loss became {loss} on sample {i}"),
                });
            }
            model.apply(&grads, config.learning_rate);
            if !model.is_finite() {
                return Err(Error::TrainingFailure {
                    epoch,
                    step,
                    reason: format!("weights diverged after sample {i} (loss {loss})"),
                });
            }
        }
        let loss = mean_loss(&model, &data)?;
        if !loss.is_finite() {
            return Err(Error::TrainingFailure {
                epoch,
                step: order.len(),
                reason: format!("mean loss became {loss}"),
            });
        }
        epoch_losses.push(loss);
    }
    Ok((
        model,
        TrainReport {
            initial_loss,
            epoch_losses,
        },
    ))
}

/// Step-size schedule for single-sample finetuning. A step whose loss would
/// exceed the current loss is retried at half the size, up to
/// `max_halvings` times, and skipped otherwise, so the sample's loss never
/// increases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinetuneConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub max_halvings: usize,
}

impl Default for FinetuneConfig {
    fn default() -> Self {
        Self {
            steps: 10,
            learning_rate: 1e-2,
            max_halvings: 6,
        }
    }
}

/// Copy of `model` adapted to one utterance; `model` itself is untouched.
pub fn finetune_aligner(
    model: &AlignerModel,
    features: &Array2<f64>,
    phones: &PhoneSequence,
    steps: usize,
) -> Result<AlignerModel> {
    finetune_aligner_with(
        model,
        features,
        phones,
        &FinetuneConfig {
            steps,
            ..FinetuneConfig::default()
        },
    )
}

pub fn finetune_aligner_with(
    model: &AlignerModel,
    features: &Array2<f64>,
    phones: &PhoneSequence,
    config: &FinetuneConfig,
) -> Result<AlignerModel> {
    let target = model.inventory.encode(phones)?;
    let mut tuned = model.clone();
    // validates feasibility even when no steps are requested
    let mut current = tuned.loss(features, &target)?;
    for _ in 0..config.steps {
        let (_, grads) = tuned.loss_and_gradients(features, &target)?;
        let mut step = config.learning_rate;
        let mut accepted = false;
        for _ in 0..=config.max_halvings {
            let mut candidate = tuned.clone();
            candidate.apply(&grads, step);
            let loss = candidate.loss(features, &target)?;
            if loss.is_finite() && loss <= current {
                tuned = candidate;
                current = loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(tuned)
}

/// Frame-level posteriors of `model` for already-extracted features.
pub fn posteriorgram(model: &AlignerModel, features: &Array2<f64>) -> Result<Posteriorgram> {
    Posteriorgram::from_log_probs(&model.log_posteriors(features)?)
}

/// Features -> optional finetuning -> posteriors -> monotonic alignment search.
pub fn align_features(
    model: &AlignerModel,
    features: &Array2<f64>,
    phones: &PhoneSequence,
    finetune_steps: usize,
) -> Result<Alignment> {
    let target = model.inventory.encode(phones)?;
    if target.is_empty() {
        return Err(Error::invalid("transcript is empty"));
    }
    if features.nrows() < target.len() {
        return Err(Error::Infeasible {
            frames: features.nrows(),
            required: target.len(),
        });
    }
    let post = if finetune_steps > 0 {
        let tuned = finetune_aligner(model, features, phones, finetune_steps)?;
        posteriorgram(&tuned, features)?
    } else {
        posteriorgram(model, features)?
    };
    mas_decode(&post, &target)
}

/// Shortest run of frames [`recognize`] accepts as a phone.
pub const MIN_PHONE_RUN: usize = 3;

/// Transcribes with [`MIN_PHONE_RUN`].
pub fn recognize(model: &AlignerModel, features: &Array2<f64>) -> Result<PhoneSequence> {
    recognize_with(model, features, MIN_PHONE_RUN)
}

/// Per-frame argmax over the non-blank classes; runs shorter than `min_run`
/// frames are dropped and adjacent equal runs merged.
pub fn recognize_with(
    model: &AlignerModel,
    features: &Array2<f64>,
    min_run: usize,
) -> Result<PhoneSequence> {
    let log_probs = model.log_posteriors(features)?;
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for row in log_probs.rows() {
        let best = (0..row.len())
            .filter(|&k| k != PhoneInventory::BLANK)
            .max_by(|&a, &b| row[a].total_cmp(&row[b]))
            .ok_or_else(|| Error::invalid("model has no phone classes"))?;
        match runs.last_mut() {
            Some((k, n)) if *k == best => *n += 1,
            _ => runs.push((best, 1)),
        }
    }
    let mut phones: Vec<String> = Vec::new();
    for (k, n) in runs {
        if n < min_run.max(1) {
            continue;
        }
        let symbol = model.inventory.symbol_of(k).expect("class in inventory");
        if phones.last().map(String::as_str) != Some(symbol) {
            phones.push(symbol.to_string());
        }
    }
    Ok(PhoneSequence(phones))
}

pub fn align_audio(
    model: &AlignerModel,
    audio: &AudioBuffer,
    phones: &PhoneSequence,
    config: &FrameConfig,
    finetune_steps: usize,
) -> Result<Alignment> {
    let features = model.features.extract(audio, config)?;
    align_features(model, &features, phones, finetune_steps)
}
