//! Waveform analysis: framing, log-mel spectra, MFCCs, frame energy and
//! autocorrelation pitch tracking.
//!
//! Every analysis routine that takes a [`FrameConfig`] produces the same
//! number of frames for a given buffer, so contours and spectra computed from
//! one recording share a time axis.

mod contour;
mod energy;
mod mel;
mod pitch;

pub use contour::{EnergyContour, PitchContour};
pub use energy::frame_energy;
pub(crate) use mel::standardize;
pub use mel::{
    add_deltas, hz_to_mel, mel_spectrogram, mel_to_hz, mfcc, MelFilterbank, MelSpectrogram,
};
pub use pitch::{estimate_pitch, estimate_pitch_with, PitchConfig};

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// Log floor applied to mel magnitudes before taking the logarithm.
pub const LOG_FLOOR: f64 = 1e-5;

/// Tapering function applied to each analysis frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hann,
    Hamming,
}

impl Window {
    /// Symmetric window coefficients of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![1.0];
        }
        let denom = (n - 1) as f64;
        (0..n)
            .map(|i| {
                let phase = 2.0 * std::f64::consts::PI * i as f64 / denom;
                match self {
                    Window::Rectangular => 1.0,
                    Window::Hann => 0.5 - 0.5 * phase.cos(),
                    Window::Hamming => 0.54 - 0.46 * phase.cos(),
                }
            })
            .collect()
    }
}

/// Frame length, hop and window shared by every contour of one analysis pass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    pub frame_length_s: f64,
    pub frame_shift_s: f64,
    pub window: Window,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            frame_length_s: 0.025,
            frame_shift_s: 0.010,
            window: Window::Hann,
        }
    }
}

impl FrameConfig {
    pub fn new(frame_length_s: f64, frame_shift_s: f64, window: Window) -> Result<Self> {
        let cfg = Self {
            frame_length_s,
            frame_shift_s,
            window,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frame_shift_s > 0.0 && self.frame_shift_s <= self.frame_length_s)
            || !self.frame_length_s.is_finite()
        {
            return Err(Error::invalid(format!(
                "frame shift {} s must satisfy 0 < shift <= length {} s",
                self.frame_shift_s, self.frame_length_s
            )));
        }
        Ok(())
    }

    pub fn frame_len_samples(&self, sample_rate: u32) -> usize {
        ((self.frame_length_s * sample_rate as f64).round() as usize).max(1)
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        ((self.frame_shift_s * sample_rate as f64).round() as usize).max(1)
    }

    /// Samples of lead-in before the first frame centre lines up with the
    /// middle of the first hop. Renderers pad by this much so that phone
    /// `i`'s `d` hops map onto exactly `d` analysis frames.
    pub fn centering_pad_samples(&self, sample_rate: u32) -> usize {
        (self.frame_len_samples(sample_rate) - self.hop_samples(sample_rate)) / 2
    }

    /// `floor((len - frame_len) / hop) + 1`, or an error if the buffer is
    /// shorter than one frame.
    pub fn n_frames(&self, n_samples: usize, sample_rate: u32) -> Result<usize> {
        self.validate()?;
        let frame_len = self.frame_len_samples(sample_rate);
        if n_samples < frame_len {
            return Err(Error::invalid(format!(
                "audio of {n_samples} samples is shorter than one frame ({frame_len} samples)"
            )));
        }
        Ok((n_samples - frame_len) / self.hop_samples(sample_rate) + 1)
    }

    /// Iterator over `(start, end)` sample ranges of every frame.
    pub(crate) fn frames(
        &self,
        audio: &AudioBuffer,
    ) -> Result<impl Iterator<Item = (usize, usize)>> {
        let sr = audio.sample_rate();
        let n = self.n_frames(audio.len(), sr)?;
        let hop = self.hop_samples(sr);
        let len = self.frame_len_samples(sr);
        Ok((0..n).map(move |t| (t * hop, t * hop + len)))
    }
}
