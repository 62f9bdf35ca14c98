//! Utterance-level speaker embeddings: ingestion of externally computed
//! vectors and a spectral-statistics baseline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::dsp::{
    estimate_pitch_with, frame_energy, mel_spectrogram, FrameConfig, PitchConfig, LOG_FLOOR,
};
use crate::error::{Error, Result};

/// Mel bands used by [`stats_embedding`].
pub const STATS_N_MELS: usize = 40;
/// `2 * STATS_N_MELS` log-mel statistics, then ln-F0 mean/std, then log-energy mean/std.
pub const STATS_DIM: usize = 2 * STATS_N_MELS + 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingSource {
    External,
    StatsBaseline,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeakerEmbedding {
    values: Vec<f64>,
    source: EmbeddingSource,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingFile {
    dim: usize,
    values: Vec<f64>,
    #[serde(default = "external")]
    source: EmbeddingSource,
}

fn external() -> EmbeddingSource {
    EmbeddingSource::External
}

impl SpeakerEmbedding {
    pub fn new(values: Vec<f64>, source: EmbeddingSource) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("embedding has no entries"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("embedding entry {i} is not finite")));
        }
        Ok(Self { values, source })
    }

    pub fn external(values: Vec<f64>) -> Result<Self> {
        Self::new(values, EmbeddingSource::External)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn source(&self) -> EmbeddingSource {
        self.source
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&EmbeddingFile {
            dim: self.dim(),
            values: self.values.clone(),
            source: self.source,
        })?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

/// Reads `{dim, values, source}` JSON, or a flat CSV of reals whose dimension
/// is the number of values. The result is always tagged as external.
pub fn load_embedding(path: impl AsRef<Path>) -> Result<SpeakerEmbedding> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embedding(&text)
}

pub fn parse_embedding(text: &str) -> Result<SpeakerEmbedding> {
    let trimmed = text.trim_start();
    let values = if trimmed.starts_with('{') {
        let file: EmbeddingFile = serde_json::from_str(trimmed)?;
        if file.dim != file.values.len() {
            return Err(Error::DimensionMismatch {
                expected: file.dim,
                found: file.values.len(),
            });
        }
        file.values
    } else {
        trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("embedding value {s:?} is not a number")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    SpeakerEmbedding::external(values)
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Deterministic [`STATS_DIM`]-dimensional embedding. Pitch statistics are
/// over voiced frames only and are zero when nothing is voiced; silence
/// therefore maps to `ln(LOG_FLOOR)` means with zero spreads.
pub fn stats_embedding(audio: &AudioBuffer, config: &FrameConfig) -> Result<SpeakerEmbedding> {
    let spec = mel_spectrogram(audio, config, STATS_N_MELS)?;
    let mut values = Vec::with_capacity(STATS_DIM);
    for band in spec.frames.columns() {
        let (m, s) = mean_std(band.iter().copied());
        values.push(m);
        values.push(s);
    }
    let pitch = estimate_pitch_with(audio, config, &PitchConfig::default())?;
    let (m, s) = mean_std(pitch.values().iter().filter(|&&f| f > 0.0).map(|f| f.ln()));
    values.extend([m, s]);
    let energy = frame_energy(audio, config)?;
    let (m, s) = mean_std(energy.values().iter().map(|e| e.max(LOG_FLOOR).ln()));
    values.extend([m, s]);
    SpeakerEmbedding::new(values, EmbeddingSource::StatsBaseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cosine_similarity;

    fn tone(f: f64, amp: f64) -> AudioBuffer {
        let sr = 16000;
        let s = (0..sr as usize / 2)
            .map(|n| amp * (2.0 * std::f64::consts::PI * f * n as f64 / sr as f64).sin())
            .collect();
        AudioBuffer::new(s, sr).unwrap()
    }

    #[test]
    fn json_and_csv_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.json");
        std::fs::write(
            &p,
            r#"{"dim": 3, "values": [0.5, -1, 2], "source": "external"}"#,
        )
        .unwrap();
        let e = load_embedding(&p).unwrap();
        assert_eq!(e.dim(), 3);
        assert_eq!(e.source(), EmbeddingSource::External);

        let p = dir.path().join("e.csv");
        std::fs::write(&p, "0.5,-1,2\n").unwrap();
        assert_eq!(load_embedding(&p).unwrap().values(), &[0.5, -1.0, 2.0]);

        let round = parse_embedding(&e.to_json().unwrap()).unwrap();
        assert_eq!(round, e);
    }

    #[test]
    fn declared_dim_mismatch() {
        let values = vec![0.1; 191];
        let text = serde_json::json!({"dim": 192, "values": values}).to_string();
        assert!(matches!(
            parse_embedding(&text),
            Err(Error::DimensionMismatch {
                expected: 192,
                found: 191
            })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(parse_embedding("1.0, NaN, 2.0").is_err());
        assert!(parse_embedding("1.0, inf").is_err());
        assert!(load_embedding("/nonexistent/e.json").is_err());
    }

    #[test]
    fn stats_are_deterministic() {
        let a = tone(180.0, 0.3);
        let cfg = FrameConfig::default();
        let e1 = stats_embedding(&a, &cfg).unwrap();
        let e2 = stats_embedding(&a, &cfg).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.dim(), STATS_DIM);
        assert!((cosine_similarity(&e1, &e2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn silence_is_floor_vector() {
        let e = stats_embedding(
            &AudioBuffer::silence(0.5, 16000).unwrap(),
            &FrameConfig::default(),
        )
        .unwrap();
        let floor = LOG_FLOOR.ln();
        for b in 0..STATS_N_MELS {
            assert!((e.values()[2 * b] - floor).abs() < 1e-12);
            assert!(e.values()[2 * b + 1] < 1e-9);
        }
        let tail = &e.values()[2 * STATS_N_MELS..];
        assert_eq!(&tail[..2], &[0.0, 0.0]);
        assert!((tail[2] - floor).abs() < 1e-12 && tail[3] < 1e-9);
    }

    #[test]
    fn register_shows_in_pitch_coordinates() {
        let cfg = FrameConfig::default();
        let lo = stats_embedding(&tone(120.0, 0.3), &cfg).unwrap();
        let hi = stats_embedding(&tone(240.0, 0.3), &cfg).unwrap();
        let k = 2 * STATS_N_MELS;
        assert!((lo.values()[k] - 120f64.ln()).abs() < 0.02);
        assert!((hi.values()[k] - 240f64.ln()).abs() < 0.02);
    }
}
