//! Short-term autocorrelation pitch tracking.
//!
//! Each frame is analysed over a Hann window spanning three periods of the
//! lowest admissible pitch, centred on the frame centre. The windowed
//! autocorrelation is divided by the window's own autocorrelation, local
//! maxima inside the lag range are refined by parabolic interpolation, and a
//! small octave cost favours shorter lags among near-equal peaks.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

use super::{FrameConfig, PitchContour, Window};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PitchConfig {
    pub f_min: f64,
    pub f_max: f64,
    /// Minimum normalized autocorrelation peak for a voiced decision.
    pub voicing_threshold: f64,
    /// Frames whose local peak is below this fraction of the global peak are unvoiced.
    pub silence_threshold: f64,
    /// Strength penalty per octave of lag above `1 / f_max`.
    pub octave_cost: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            f_min: 60.0,
            f_max: 400.0,
            voicing_threshold: 0.45,
            silence_threshold: 0.03,
            octave_cost: 0.01,
        }
    }
}

impl PitchConfig {
    pub fn with_range(f_min: f64, f_max: f64) -> Self {
        Self {
            f_min,
            f_max,
            ..Self::default()
        }
    }

    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        if !(self.f_min > 0.0 && self.f_min < self.f_max) {
            return Err(Error::invalid(format!(
                "pitch range [{}, {}] Hz is empty",
                self.f_min, self.f_max
            )));
        }
        if self.f_max >= sample_rate as f64 / 2.0 {
            return Err(Error::invalid(format!(
                "f_max {} Hz must lie below Nyquist ({} Hz)",
                self.f_max,
                sample_rate as f64 / 2.0
            )));
        }
        Ok(())
    }
}

/// Pitch contour with default thresholds and the given search range.
pub fn estimate_pitch(
    audio: &AudioBuffer,
    config: &FrameConfig,
    f_min: f64,
    f_max: f64,
) -> Result<PitchContour> {
    estimate_pitch_with(audio, config, &PitchConfig::with_range(f_min, f_max))
}

pub fn estimate_pitch_with(
    audio: &AudioBuffer,
    config: &FrameConfig,
    pitch: &PitchConfig,
) -> Result<PitchContour> {
    let sr = audio.sample_rate();
    pitch.validate(sr)?;
    let n_frames = config.n_frames(audio.len(), sr)?;
    let srf = sr as f64;
    let frame_len = config.frame_len_samples(sr);
    let hop = config.hop_samples(sr);

    let win_len = frame_len.max((3.0 * srf / pitch.f_min).ceil() as usize);
    let lag_min = ((srf / pitch.f_max).floor() as usize).max(2);
    let lag_max = ((srf / pitch.f_min).ceil() as usize).min(win_len - 2);
    let n_fft = (2 * win_len).next_power_of_two();

    let window = Window::Hann.coefficients(win_len);
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n_fft);
    let inverse = planner.plan_fft_inverse(n_fft);

    let autocorr = |segment: &[f64], buf: &mut Vec<Complex<f64>>| -> Vec<f64> {
        buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
        for (slot, &v) in buf.iter_mut().zip(segment) {
            slot.re = v;
        }
        forward.process(buf);
        buf.iter_mut()
            .for_each(|c| *c = Complex::new(c.norm_sqr(), 0.0));
        inverse.process(buf);
        buf.iter()
            .take(lag_max + 2)
            .map(|c| c.re / n_fft as f64)
            .collect()
    };

    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    let window_ac = autocorr(&window, &mut buf);
    let window_ac: Vec<f64> = window_ac.iter().map(|r| r / window_ac[0]).collect();

    let samples = audio.samples();
    let global_peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let mut segment = vec![0.0; win_len];
    let mut f0 = Vec::with_capacity(n_frames);
    for t in 0..n_frames {
        if global_peak == 0.0 {
            f0.push(0.0);
            continue;
        }
        let centre = t * hop + frame_len / 2;
        let start = centre as isize - (win_len / 2) as isize;
        let mut local_peak = 0.0f64;
        for (i, slot) in segment.iter_mut().enumerate() {
            let idx = start + i as isize;
            *slot = if idx >= 0 && (idx as usize) < samples.len() {
                samples[idx as usize]
            } else {
                0.0
            };
            local_peak = local_peak.max(slot.abs());
        }
        if local_peak < pitch.silence_threshold * global_peak {
            f0.push(0.0);
            continue;
        }
        let mean = segment.iter().sum::<f64>() / win_len as f64;
        for (s, w) in segment.iter_mut().zip(&window) {
            *s = (*s - mean) * w;
        }
        let r = autocorr(&segment, &mut buf);
        if r[0] <= 0.0 {
            f0.push(0.0);
            continue;
        }
        let norm: Vec<f64> = r
            .iter()
            .zip(&window_ac)
            .map(|(ra, rw)| if *rw > 1e-9 { ra / r[0] / rw } else { 0.0 })
            .collect();
        f0.push(best_candidate(&norm, lag_min, lag_max, srf, pitch).unwrap_or(0.0));
    }
    PitchContour::new(f0)
}

fn best_candidate(
    r: &[f64],
    lag_min: usize,
    lag_max: usize,
    sr: f64,
    cfg: &PitchConfig,
) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for lag in lag_min.max(1)..=lag_max.min(r.len() - 2) {
        let (prev, cur, next) = (r[lag - 1], r[lag], r[lag + 1]);
        if !(cur >= prev && cur >= next) || cur <= 0.0 {
            continue;
        }
        let curvature = prev - 2.0 * cur + next;
        let delta = if curvature < 0.0 {
            (0.5 * (prev - next) / curvature).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let mut peak = cur - 0.25 * (prev - next) * delta;
        if peak > 1.0 {
            peak = 1.0 / peak;
        }
        if peak < cfg.voicing_threshold {
            continue;
        }
        let freq = sr / (lag as f64 + delta);
        if !(cfg.f_min..=cfg.f_max).contains(&freq) {
            continue;
        }
        let strength = peak - cfg.octave_cost * (cfg.f_min * (lag as f64 + delta) / sr).log2();
        if best.is_none_or(|(s, _)| strength > s) {
            best = Some((strength, freq));
        }
    }
    best.map(|(_, f)| f)
}
