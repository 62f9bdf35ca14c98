#![allow(dead_code)]

use std::sync::OnceLock;

use prosody_clone::align::{train_aligner, AlignerModel, TrainConfig, TrainReport, TrainingSample};
use prosody_clone::dsp::FrameConfig;
use prosody_clone::prosody::{Register, StatsBaselinePredictor};
use prosody_clone::synth::{
    make_toy_corpus_with, toy_inventory, ToyCorpusConfig, ToyUtterance, Voice,
};

pub struct Toy {
    pub config: ToyCorpusConfig,
    pub train: Vec<ToyUtterance>,
    pub test: Vec<ToyUtterance>,
    pub model: AlignerModel,
    pub report: TrainReport,
    pub baseline: StatsBaselinePredictor,
}

impl Toy {
    pub fn frames(&self) -> &FrameConfig {
        &self.config.frames
    }
}

pub fn samples(
    model_cfg: &TrainConfig,
    config: &ToyCorpusConfig,
    corpus: &[ToyUtterance],
) -> Vec<TrainingSample> {
    corpus
        .iter()
        .map(|u| TrainingSample {
            features: model_cfg
                .features
                .extract(&u.audio, &config.frames)
                .unwrap(),
            phones: u.phones.clone(),
        })
        .collect()
}

/// Aligner trained on 60 two-voice toy utterances, with 40 held-out ones.
pub fn toy() -> &'static Toy {
    static TOY: OnceLock<Toy> = OnceLock::new();
    TOY.get_or_init(|| {
        let config = ToyCorpusConfig::new(toy_inventory()).unwrap();
        let train = make_toy_corpus_with(&config, 60, 11).unwrap();
        let test = make_toy_corpus_with(&config, 40, 12).unwrap();
        let cfg = TrainConfig::default();
        let (model, report) =
            train_aligner(&samples(&cfg, &config, &train), &config.inventory, &cfg).unwrap();
        let baseline =
            StatsBaselinePredictor::fit(train.iter().map(|u| (&u.phones, &u.targets))).unwrap();
        Toy {
            config,
            train,
            test,
            model,
            report,
            baseline,
        }
    })
}

/// A voice between the two training voices, absent from the training data.
pub fn unseen_voice() -> Voice {
    Voice {
        name: "unseen".into(),
        timbre_scale: 1.08,
        register: Register {
            pitch_mean_hz: 155.0,
            energy_mean: 0.045,
        },
    }
}
