use crate::audio::AudioBuffer;
use crate::error::Result;

use super::{EnergyContour, FrameConfig};

/// Window-compensated RMS of every frame: `sqrt(sum (w x)^2 / sum w^2)`.
///
/// Dividing by the window power makes a constant-amplitude signal read the
/// same energy under any window.
pub fn frame_energy(audio: &AudioBuffer, config: &FrameConfig) -> Result<EnergyContour> {
    let frame_len = config.frame_len_samples(audio.sample_rate());
    let window = config.window.coefficients(frame_len);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let samples = audio.samples();
    let energy = config
        .frames(audio)?
        .map(|(start, end)| {
            let acc: f64 = samples[start..end]
                .iter()
                .zip(&window)
                .map(|(x, w)| (x * w) * (x * w))
                .sum();
            if window_power > 0.0 {
                (acc / window_power).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    EnergyContour::new(energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::Window;

    #[test]
    fn silence_is_zero() {
        let audio = AudioBuffer::silence(0.5, 16000).unwrap();
        let e = frame_energy(&audio, &FrameConfig::default()).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_amplitude_reads_back() {
        let audio = AudioBuffer::new(vec![0.3; 8000], 16000).unwrap();
        for window in [Window::Rectangular, Window::Hann] {
            let cfg = FrameConfig {
                window,
                ..FrameConfig::default()
            };
            let e = frame_energy(&audio, &cfg).unwrap();
            assert!(e.values().iter().all(|&v| (v - 0.3).abs() < 1e-12));
        }
    }

    #[test]
    fn doubling_amplitude_doubles_energy() {
        let samples: Vec<f64> = (0..8000)
            .map(|n| 0.2 * (n as f64 * 0.05).sin() + 0.1 * (n as f64 * 0.31).cos())
            .collect();
        let a = AudioBuffer::new(samples.clone(), 16000).unwrap();
        let b = AudioBuffer::new(samples.iter().map(|s| 2.0 * s).collect(), 16000).unwrap();
        let cfg = FrameConfig::default();
        let ea = frame_energy(&a, &cfg).unwrap();
        let eb = frame_energy(&b, &cfg).unwrap();
        for (x, y) in ea.values().iter().zip(eb.values()) {
            assert!((y - 2.0 * x).abs() <= 1e-9 * y.abs().max(1e-300));
        }
    }
}
