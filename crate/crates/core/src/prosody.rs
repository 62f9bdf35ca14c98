//! Phone-level prosody: per-phone averaging, utterance-level normalization,
//! register-aware de-normalization and overwriting a predictor's output.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::align::{align_features, AlignerModel, Alignment, PhoneSequence};
use crate::audio::AudioBuffer;
use crate::dsp::{
    estimate_pitch_with, frame_energy, EnergyContour, FrameConfig, PitchConfig, PitchContour,
};
use crate::error::{Error, Result};

pub const SIGNATURE_FORMAT_VERSION: u32 = 1;

/// Absolute scale of an utterance: mean voiced pitch and mean energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Register {
    pub pitch_mean_hz: f64,
    pub energy_mean: f64,
}

impl Register {
    pub fn new(pitch_mean_hz: f64, energy_mean: f64) -> Result<Self> {
        let r = Self {
            pitch_mean_hz,
            energy_mean,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pitch_mean_hz > 0.0 && self.pitch_mean_hz.is_finite())
            || !(self.energy_mean > 0.0 && self.energy_mean.is_finite())
        {
            return Err(Error::invalid(format!(
                "register ({} Hz, {}) must be strictly positive",
                self.pitch_mean_hz, self.energy_mean
            )));
        }
        Ok(())
    }
}

/// Absolute per-phone durations (frames), pitch (Hz, 0 = unvoiced) and energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProsodyTargets {
    pub durations: Vec<usize>,
    pub pitch_hz: Vec<f64>,
    pub energy: Vec<f64>,
}

impl ProsodyTargets {
    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }

    pub fn total_frames(&self) -> usize {
        self.durations.iter().sum()
    }

    pub fn validate(&self, n_phones: usize) -> Result<()> {
        if self.durations.len() != n_phones
            || self.pitch_hz.len() != n_phones
            || self.energy.len() != n_phones
        {
            return Err(Error::invalid(format!(
                "prosody targets have {}/{}/{} entries for {n_phones} phones",
                self.durations.len(),
                self.pitch_hz.len(),
                self.energy.len()
            )));
        }
        if self
            .pitch_hz
            .iter()
            .chain(&self.energy)
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::invalid(
                "pitch and energy targets must be finite and >= 0",
            ));
        }
        Ok(())
    }
}

/// Transferable prosody of one reference utterance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProsodySignature {
    pub version: u32,
    pub frame_shift_s: f64,
    pub phones: PhoneSequence,
    pub durations_frames: Vec<usize>,
    /// Per-phone pitch divided by the mean over voiced phones; 0 = unvoiced.
    pub pitch_norm: Vec<f64>,
    pub energy_norm: Vec<f64>,
    pub register: Register,
}

impl ProsodySignature {
    pub fn len(&self) -> usize {
        self.phones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SIGNATURE_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: SIGNATURE_FORMAT_VERSION,
                found: self.version,
            });
        }
        let n = self.phones.len();
        if n == 0 {
            return Err(Error::invalid("signature has no phones"));
        }
        if self.durations_frames.len() != n
            || self.pitch_norm.len() != n
            || self.energy_norm.len() != n
        {
            return Err(Error::invalid("signature lists differ in length"));
        }
        if self.durations_frames.contains(&0) {
            return Err(Error::invalid("signature durations must be >= 1 frame"));
        }
        if self
            .pitch_norm
            .iter()
            .chain(&self.energy_norm)
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::invalid("normalized values must be finite and >= 0"));
        }
        if !(self.frame_shift_s > 0.0) {
            return Err(Error::invalid("frame shift must be positive"));
        }
        self.register.validate()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sig: Self = serde_json::from_str(text)?;
        sig.validate()?;
        Ok(sig)
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

/// Mean pitch over voiced frames (0 if none) and mean energy over all frames of every span.
pub fn average_per_phone(
    pitch: &PitchContour,
    energy: &EnergyContour,
    alignment: &Alignment,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let frames = alignment.n_frames();
    if pitch.len() != frames || energy.len() != frames {
        return Err(Error::invalid(format!(
            "contours of {} / {} frames for an alignment of {frames} frames",
            pitch.len(),
            energy.len()
        )));
    }
    let (f0, en) = (pitch.values(), energy.values());
    Ok(alignment
        .spans()
        .iter()
        .map(|&(s, e)| {
            let voiced: Vec<f64> = f0[s..e].iter().copied().filter(|&v| v > 0.0).collect();
            let p = if voiced.is_empty() {
                0.0
            } else {
                voiced.iter().sum::<f64>() / voiced.len() as f64
            };
            (p, en[s..e].iter().sum::<f64>() / (e - s) as f64)
        })
        .unzip())
}

/// Divides nonzero entries by their mean; zeros stay zero. Returns the mean.
pub fn normalize(values: &[f64]) -> Result<(Vec<f64>, f64)> {
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid(
            "values to normalize must be finite and >= 0",
        ));
    }
    let nonzero: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::degenerate(
            "cannot normalize a sequence with no nonzero values",
        ));
    }
    let mean = nonzero.iter().sum::<f64>() / nonzero.len() as f64;
    Ok((
        values
            .iter()
            .map(|&v| if v > 0.0 { v / mean } else { 0.0 })
            .collect(),
        mean,
    ))
}

pub fn denormalize(normalized: &[f64], mean: f64) -> Vec<f64> {
    normalized.iter().map(|&v| v * mean).collect()
}

/// Builds a signature from contours and an alignment already in hand.
pub fn signature_from_alignment(
    phones: &PhoneSequence,
    alignment: &Alignment,
    pitch: &PitchContour,
    energy: &EnergyContour,
    frame_shift_s: f64,
) -> Result<ProsodySignature> {
    if phones.len() != alignment.n_phones() {
        return Err(Error::invalid(format!(
            "{} phones for an alignment of {} spans",
            phones.len(),
            alignment.n_phones()
        )));
    }
    let (pitch_avg, energy_avg) = average_per_phone(pitch, energy, alignment)?;
    let (pitch_norm, pitch_mean_hz) = normalize(&pitch_avg).map_err(|_| {
        Error::degenerate("no voiced phone in the reference; pitch register is undefined")
    })?;
    let (energy_norm, energy_mean) =
        normalize(&energy_avg).map_err(|_| Error::degenerate("reference carries no energy"))?;
    Ok(ProsodySignature {
        version: SIGNATURE_FORMAT_VERSION,
        frame_shift_s,
        phones: phones.clone(),
        durations_frames: alignment.durations(),
        pitch_norm,
        energy_norm,
        register: Register {
            pitch_mean_hz,
            energy_mean,
        },
    })
}

/// Everything computed while extracting a signature.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub signature: ProsodySignature,
    pub alignment: Alignment,
    pub pitch: PitchContour,
    pub energy: EnergyContour,
}

/// Align, track pitch and energy, average per phone and normalize.
pub fn extract(
    audio: &AudioBuffer,
    phones: &PhoneSequence,
    model: &AlignerModel,
    config: &FrameConfig,
    pitch_config: &PitchConfig,
    finetune_steps: usize,
) -> Result<Extraction> {
    let features = model.features.extract(audio, config)?;
    let alignment = align_features(model, &features, phones, finetune_steps)?;
    let pitch = estimate_pitch_with(audio, config, pitch_config)?;
    let energy = frame_energy(audio, config)?;
    let signature =
        signature_from_alignment(phones, &alignment, &pitch, &energy, config.frame_shift_s)?;
    Ok(Extraction {
        signature,
        alignment,
        pitch,
        energy,
    })
}

pub fn extract_signature(
    audio: &AudioBuffer,
    phones: &PhoneSequence,
    model: &AlignerModel,
    config: &FrameConfig,
    finetune_steps: usize,
) -> Result<ProsodySignature> {
    extract(
        audio,
        phones,
        model,
        config,
        &PitchConfig::default(),
        finetune_steps,
    )
    .map(|e| e.signature)
}

/// De-normalizes a signature into absolute targets for `target`.
pub fn apply_signature(sig: &ProsodySignature, target: &Register) -> Result<ProsodyTargets> {
    target.validate()?;
    Ok(ProsodyTargets {
        durations: sig.durations_frames.clone(),
        pitch_hz: denormalize(&sig.pitch_norm, target.pitch_mean_hz),
        energy: denormalize(&sig.energy_norm, target.energy_mean),
    })
}

/// Anything that predicts per-phone prosody for a transcript.
///
/// `predict` takes `&self`; implementations with interior state must
/// synchronize it themselves if shared across threads.
pub trait ProsodyPredictor {
    fn predict(&self, phones: &PhoneSequence, register: &Register) -> Result<ProsodyTargets>;
}

/// Runs `predictor`, then overwrites every duration, pitch and energy value
/// with the signature's de-normalized values.
pub fn clone_prosody(
    predictor: &dyn ProsodyPredictor,
    phones: &PhoneSequence,
    sig: &ProsodySignature,
    target: &Register,
) -> Result<ProsodyTargets> {
    if sig.len() != phones.len() {
        return Err(Error::invalid(format!(
            "signature of {} phones cannot drive a transcript of {} phones",
            sig.len(),
            phones.len()
        )));
    }
    let predicted = predictor.predict(phones, target)?;
    predicted.validate(phones.len())?;
    apply_signature(sig, target)
}

pub fn register_from_audio(audio: &AudioBuffer, config: &FrameConfig) -> Result<Register> {
    register_from_audio_with(audio, config, &PitchConfig::default())
}

/// Mean F0 over voiced frames and mean frame energy.
pub fn register_from_audio_with(
    audio: &AudioBuffer,
    config: &FrameConfig,
    pitch: &PitchConfig,
) -> Result<Register> {
    let f0 = estimate_pitch_with(audio, config, pitch)?;
    let voiced: Vec<f64> = f0.values().iter().copied().filter(|&v| v > 0.0).collect();
    if voiced.is_empty() {
        return Err(Error::degenerate("audio has no voiced frames"));
    }
    let energy = frame_energy(audio, config)?;
    let energy_mean = energy.values().iter().sum::<f64>() / energy.len() as f64;
    Register::new(
        voiced.iter().sum::<f64>() / voiced.len() as f64,
        energy_mean,
    )
    .map_err(|_| Error::degenerate("audio has no energy"))
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct PhoneStats {
    duration: f64,
    pitch_norm: f64,
    energy_norm: f64,
    count: usize,
}

/// Per-phone mean duration and mean normalized pitch/energy, de-normalized
/// with the requested register. Stands in for a learned predictor.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StatsBaselinePredictor {
    stats: HashMap<String, PhoneStats>,
    fallback: PhoneStats,
}

impl StatsBaselinePredictor {
    /// Fits per-phone statistics from ground-truth utterances.
    pub fn fit<'a>(
        examples: impl IntoIterator<Item = (&'a PhoneSequence, &'a ProsodyTargets)>,
    ) -> Result<Self> {
        let mut stats: HashMap<String, PhoneStats> = HashMap::new();
        let mut fallback = PhoneStats::default();
        for (phones, targets) in examples {
            targets.validate(phones.len())?;
            let (pitch_norm, _) =
                normalize(&targets.pitch_hz).unwrap_or((vec![0.0; phones.len()], 0.0));
            let (energy_norm, _) =
                normalize(&targets.energy).unwrap_or((vec![0.0; phones.len()], 0.0));
            for (i, phone) in phones.iter().enumerate() {
                for s in [stats.entry(phone.to_string()).or_default(), &mut fallback] {
                    s.duration += targets.durations[i] as f64;
                    s.pitch_norm += pitch_norm[i];
                    s.energy_norm += energy_norm[i];
                    s.count += 1;
                }
            }
        }
        if fallback.count == 0 {
            return Err(Error::invalid("no examples to fit the baseline"));
        }
        for s in stats.values_mut().chain(std::iter::once(&mut fallback)) {
            let n = s.count as f64;
            s.duration /= n;
            s.pitch_norm /= n;
            s.energy_norm /= n;
        }
        Ok(Self { stats, fallback })
    }
}

impl ProsodyPredictor for StatsBaselinePredictor {
    fn predict(&self, phones: &PhoneSequence, register: &Register) -> Result<ProsodyTargets> {
        register.validate()?;
        let mut out = ProsodyTargets {
            durations: Vec::with_capacity(phones.len()),
            pitch_hz: Vec::with_capacity(phones.len()),
            energy: Vec::with_capacity(phones.len()),
        };
        for phone in phones.iter() {
            let s = self.stats.get(phone).unwrap_or(&self.fallback);
            out.durations.push((s.duration.round() as usize).max(1));
            out.pitch_hz.push(s.pitch_norm * register.pitch_mean_hz);
            out.energy.push(s.energy_norm * register.energy_mean);
        }
        Ok(out)
    }
}
