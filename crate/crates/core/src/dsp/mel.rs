use std::f64::consts::PI;

use ndarray::{Array2, ArrayView2, Axis};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

use super::{FrameConfig, LOG_FLOOR};

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters spaced uniformly on the HTK mel scale between 0 Hz and
/// Nyquist. Filter `m` rises from `edges[m]`, peaks at `edges[m + 1]` and
/// falls to zero at `edges[m + 2]`.
#[derive(Clone, Debug)]
pub struct MelFilterbank {
    edges_hz: Vec<f64>,
    weights: Array2<f64>,
}

impl MelFilterbank {
    pub fn new(n_mels: usize, n_fft: usize, sample_rate: u32) -> Result<Self> {
        if n_mels == 0 {
            return Err(Error::invalid("n_mels must be positive"));
        }
        let nyquist = sample_rate as f64 / 2.0;
        let mel_max = hz_to_mel(nyquist);
        let edges_hz: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (n_mels + 1) as f64))
            .collect();
        let n_bins = n_fft / 2 + 1;
        let mut weights = Array2::zeros((n_mels, n_bins));
        for m in 0..n_mels {
            let (lo, mid, hi) = (edges_hz[m], edges_hz[m + 1], edges_hz[m + 2]);
            for k in 0..n_bins {
                let f = k as f64 * sample_rate as f64 / n_fft as f64;
                let w = if f > lo && f <= mid {
                    (f - lo) / (mid - lo)
                } else if f > mid && f < hi {
                    (hi - f) / (hi - mid)
                } else {
                    0.0
                };
                weights[[m, k]] = w;
            }
        }
        Ok(Self { edges_hz, weights })
    }

    pub fn n_mels(&self) -> usize {
        self.weights.nrows()
    }

    /// `n_mels + 2` band edges in Hz.
    pub fn edges_hz(&self) -> &[f64] {
        &self.edges_hz
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }
}

/// Log-mel magnitudes, one row per frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MelSpectrogram {
    pub frames: Array2<f64>,
    pub config: FrameConfig,
}

impl MelSpectrogram {
    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }

    pub fn n_mels(&self) -> usize {
        self.frames.ncols()
    }
}

/// Log-mel spectrogram with the default [`LOG_FLOOR`].
pub fn mel_spectrogram(
    audio: &AudioBuffer,
    config: &FrameConfig,
    n_mels: usize,
) -> Result<MelSpectrogram> {
    let sr = audio.sample_rate();
    let frame_len = config.frame_len_samples(sr);
    let n_fft = frame_len.next_power_of_two();
    let bank = MelFilterbank::new(n_mels, n_fft, sr)?;
    let window = config.window.coefficients(frame_len);
    let fft = FftPlanner::new().plan_fft_forward(n_fft);
    let n_frames = config.n_frames(audio.len(), sr)?;
    let n_bins = n_fft / 2 + 1;

    let samples = audio.samples();
    let mut frames = Array2::zeros((n_frames, n_mels));
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    let mut magnitude = ndarray::Array1::zeros(n_bins);
    for (t, (start, end)) in config.frames(audio)?.enumerate() {
        buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
        for (slot, (x, w)) in buf.iter_mut().zip(samples[start..end].iter().zip(&window)) {
            slot.re = x * w;
        }
        fft.process(&mut buf);
        for k in 0..n_bins {
            magnitude[k] = buf[k].norm();
        }
        let mel = bank.weights.dot(&magnitude);
        for (m, v) in mel.iter().enumerate() {
            frames[[t, m]] = v.max(LOG_FLOOR).ln();
        }
    }
    Ok(MelSpectrogram {
        frames,
        config: *config,
    })
}

/// Orthonormal DCT-II of every log-mel row, keeping the first `n_coeffs`.
pub fn mfcc(spec: &MelSpectrogram, n_coeffs: usize) -> Result<Array2<f64>> {
    let n_mels = spec.n_mels();
    if n_coeffs > n_mels {
        return Err(Error::invalid(format!(
            "{n_coeffs} coefficients requested from {n_mels} mel bands"
        )));
    }
    let mut basis = Array2::zeros((n_mels, n_coeffs));
    for k in 0..n_coeffs {
        let scale = if k == 0 {
            (1.0 / n_mels as f64).sqrt()
        } else {
            (2.0 / n_mels as f64).sqrt()
        };
        for n in 0..n_mels {
            basis[[n, k]] =
                scale * (PI * k as f64 * (2 * n + 1) as f64 / (2 * n_mels) as f64).cos();
        }
    }
    Ok(spec.frames.dot(&basis))
}

/// Appends regression deltas over `±width` frames (edge frames replicated).
pub fn add_deltas(features: &Array2<f64>, width: usize) -> Array2<f64> {
    let (t_len, dim) = features.dim();
    if width == 0 || t_len == 0 {
        return features.clone();
    }
    let denom: f64 = 2.0 * (1..=width).map(|n| (n * n) as f64).sum::<f64>();
    let mut out = Array2::zeros((t_len, 2 * dim));
    out.slice_mut(ndarray::s![.., ..dim]).assign(features);
    for t in 0..t_len {
        for n in 1..=width {
            let ahead = features.row((t + n).min(t_len - 1));
            let behind = features.row(t.saturating_sub(n));
            for d in 0..dim {
                out[[t, dim + d]] += n as f64 * (ahead[d] - behind[d]) / denom;
            }
        }
    }
    out
}

/// Per-column zero mean, unit variance (columns with no variance are only centred).
pub(crate) fn standardize(features: &mut Array2<f64>) {
    let n = features.nrows() as f64;
    if n == 0.0 {
        return;
    }
    for mut col in features.axis_iter_mut(Axis(1)) {
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        col.mapv_inplace(|v| if sd > 1e-8 { (v - mean) / sd } else { v - mean });
    }
}
