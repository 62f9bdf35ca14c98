pub mod align;
pub mod audio;
pub mod cli;
pub mod dsp;
pub mod embed;
pub mod error;
pub mod metrics;
pub mod prosody;
pub mod synth;

pub use audio::AudioBuffer;
pub use error::{Error, Result};
