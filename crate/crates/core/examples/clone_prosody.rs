//! Extracts a prosody signature from one voice and re-renders it in another.

use prosody_clone::align::{train_aligner, TrainConfig, TrainingSample};
use prosody_clone::dsp::estimate_pitch;
use prosody_clone::metrics::{msd, pitch_metrics};
use prosody_clone::prosody::{
    clone_prosody, extract_signature, ProsodyPredictor, StatsBaselinePredictor,
};
use prosody_clone::synth::{make_toy_corpus_with, render_voice, toy_inventory, ToyCorpusConfig};

fn main() -> prosody_clone::Result<()> {
    let config = ToyCorpusConfig::new(toy_inventory())?;
    let train = make_toy_corpus_with(&config, 40, 3)?;
    let cfg = TrainConfig {
        epochs: 20,
        ..TrainConfig::default()
    };
    let samples: Vec<TrainingSample> = train
        .iter()
        .map(|u| TrainingSample {
            features: cfg.features.extract(&u.audio, &config.frames).unwrap(),
            phones: u.phones.clone(),
        })
        .collect();
    let (model, _) = train_aligner(&samples, &config.inventory, &cfg)?;
    let baseline = StatsBaselinePredictor::fit(train.iter().map(|u| (&u.phones, &u.targets)))?;

    let reference = &make_toy_corpus_with(&config, 1, 77)?[0];
    let sig = extract_signature(
        &reference.audio,
        &reference.phones,
        &model,
        &config.frames,
        10,
    )?;
    println!("{}", sig.to_json()?);

    let source = &config.voices[reference.voice];
    let other = &config.voices[1 - reference.voice];
    let reference_f0 = estimate_pitch(&reference.audio, &config.frames, 60.0, 400.0)?;

    // same voice and register: cloned prosody against the baseline's guess
    let cloned = clone_prosody(&baseline, &reference.phones, &sig, &source.register)?;
    let guessed = baseline.predict(&reference.phones, &source.register)?;
    for (name, targets) in [("cloned", &cloned), ("baseline", &guessed)] {
        let audio = render_voice(&config, source, &reference.phones, targets, 0)?;
        let (ffe, vde, gpe) = pitch_metrics(
            &reference_f0,
            &estimate_pitch(&audio, &config.frames, 60.0, 400.0)?,
        )?;
        let mel = |a| prosody_clone::dsp::mel_spectrogram(a, &config.frames, 40);
        let d = msd(&mel(&reference.audio)?, &mel(&audio)?)?;
        println!("{name:9} ffe {ffe:.3}  vde {vde:.3}  gpe {gpe:.3}  msd {d:.3}");
    }

    // the same contour shape in the other speaker's register
    let moved = clone_prosody(&baseline, &reference.phones, &sig, &other.register)?;
    let audio = render_voice(&config, other, &reference.phones, &moved, 0)?;
    let f0 = estimate_pitch(&audio, &config.frames, 60.0, 400.0)?;
    let voiced: Vec<f64> = f0.values().iter().copied().filter(|&v| v > 0.0).collect();
    println!(
        "{} -> {}: mean f0 {:.1} Hz (register {:.1} Hz)",
        source.name,
        other.name,
        voiced.iter().sum::<f64>() / voiced.len() as f64,
        other.register.pitch_mean_hz
    );
    Ok(())
}
