//! Trains the CTC aligner on a toy corpus, then aligns a held-out utterance
//! with and without per-utterance fine-tuning.

use prosody_clone::align::{
    align_features, ensemble_boundaries, finetune_aligner, recognize, train_aligner, TrainConfig,
    TrainingSample,
};
use prosody_clone::synth::{make_toy_corpus_with, toy_inventory, ToyCorpusConfig};

fn main() -> prosody_clone::Result<()> {
    let config = ToyCorpusConfig::new(toy_inventory())?;
    let train = make_toy_corpus_with(&config, 40, 3)?;
    let cfg = TrainConfig {
        epochs: 20,
        ..TrainConfig::default()
    };
    let samples = train
        .iter()
        .map(|u| {
            Ok(TrainingSample {
                features: cfg.features.extract(&u.audio, &config.frames)?,
                phones: u.phones.clone(),
            })
        })
        .collect::<prosody_clone::Result<Vec<_>>>()?;
    let (model, report) = train_aligner(&samples, &config.inventory, &cfg)?;
    println!(
        "ctc loss {:.2} -> {:.2}",
        report.initial_loss,
        report.final_loss()
    );

    let held_out = &make_toy_corpus_with(&config, 1, 99)?[0];
    let features = model.features.extract(&held_out.audio, &config.frames)?;
    let truth = &held_out.alignment;
    println!("truth        {:?}", truth.boundaries());
    let mut runs = Vec::new();
    for steps in [0, 10] {
        let a = align_features(&model, &features, &held_out.phones, steps)?;
        println!(
            "{steps:2} steps     {:?}  err {:.2}",
            a.boundaries(),
            a.boundary_error(truth)?
        );
        runs.push(a);
    }
    let tuned = finetune_aligner(&model, &features, &held_out.phones, 10)?;
    println!(
        "loss on utterance {:.3} -> {:.3}",
        model.loss(&features, &model.inventory.encode(&held_out.phones)?)?,
        tuned.loss(&features, &model.inventory.encode(&held_out.phones)?)?
    );
    println!(
        "ensemble     {:?}",
        ensemble_boundaries(&runs)?.boundaries()
    );
    println!(
        "recognized   {}",
        recognize(&model, &features)?
            .iter()
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(())
}
