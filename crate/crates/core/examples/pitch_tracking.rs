//! Frame-level pitch, energy and mel features of a synthetic glide.

use prosody_clone::dsp::{estimate_pitch, frame_energy, mel_spectrogram, mfcc, FrameConfig};
use prosody_clone::AudioBuffer;

fn main() -> prosody_clone::Result<()> {
    let sr = 16000;
    // 110 Hz -> 220 Hz linear glide, 0.6 s, followed by 0.2 s of silence
    let n = (0.6 * sr as f64) as usize;
    let mut phase = 0.0;
    let mut samples: Vec<f64> = (0..n)
        .map(|i| {
            let f = 110.0 + 110.0 * i as f64 / n as f64;
            phase += 2.0 * std::f64::consts::PI * f / sr as f64;
            0.4 * phase.sin() + 0.2 * (2.0 * phase).sin()
        })
        .collect();
    samples.extend(std::iter::repeat_n(0.0, sr as usize / 5));
    let audio = AudioBuffer::new(samples, sr)?;

    let cfg = FrameConfig::default();
    let pitch = estimate_pitch(&audio, &cfg, 60.0, 400.0)?;
    let energy = frame_energy(&audio, &cfg)?;
    println!("{} frames, {} voiced", pitch.len(), pitch.voiced_count());
    for t in (0..pitch.len()).step_by(8) {
        println!(
            "frame {t:3}  f0 {:6.1} Hz  energy {:.4}",
            pitch.values()[t],
            energy.values()[t]
        );
    }

    let spec = mel_spectrogram(&audio, &cfg, 40)?;
    let cep = mfcc(&spec, 13)?;
    println!("log-mel {:?}, mfcc {:?}", spec.frames.dim(), cep.dim());
    Ok(())
}
