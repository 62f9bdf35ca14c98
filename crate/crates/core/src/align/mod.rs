//! Phone aligner: CTC-trained frame classifier decoded by monotonic
//! alignment search.

mod ctc;
mod inventory;
mod mas;
mod model;
mod train;

pub use ctc::{
    ctc_gradient, ctc_logit_gradient, ctc_loss, ctc_loss_and_gradient, log_softmax, min_frames,
};
pub use inventory::{PhoneInventory, PhoneSequence};
pub use mas::{
    alignment_score, ensemble_boundaries, mas_decode, mas_from_scores, target_scores, Alignment,
    Posteriorgram,
};
pub use model::{AlignerModel, FeatureConfig, MODEL_FORMAT_VERSION};
pub use train::{
    align_audio, align_features, finetune_aligner, finetune_aligner_with, posteriorgram, recognize,
    recognize_with, train_aligner, FinetuneConfig, TrainConfig, TrainReport, TrainingSample,
    MIN_PHONE_RUN,
};
