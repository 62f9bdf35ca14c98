//! Evaluation metrics: mel spectral distortion under DTW, F0 frame error and
//! its voicing/gross-pitch components, phone error rate and embedding cosine
//! similarity, plus a batch report format.

use std::collections::BTreeSet;
use std::io::Write;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::align::PhoneSequence;
use crate::audio::AudioBuffer;
use crate::dsp::{
    estimate_pitch_with, mel_spectrogram, FrameConfig, MelSpectrogram, PitchConfig, PitchContour,
};
use crate::embed::{stats_embedding, SpeakerEmbedding};
use crate::error::{Error, Result};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Minimum-cost warping path between two frame sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtwResult {
    pub total_cost: f64,
    /// `(t1, t2)` pairs from `(0, 0)` to `(T_x - 1, T_y - 1)`.
    pub path: Vec<(usize, usize)>,
}

fn euclidean(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// DTW over rows of `x` and `y` with Euclidean frame distance and steps
/// `(1,0)`, `(0,1)`, `(1,1)`, all unweighted.
pub fn dtw_frames(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<DtwResult> {
    let (tx, dx) = x.dim();
    let (ty, dy) = y.dim();
    if tx == 0 || ty == 0 {
        return Err(Error::invalid("DTW inputs must have at least one frame"));
    }
    if dx != dy {
        return Err(Error::DimensionMismatch {
            expected: dx,
            found: dy,
        });
    }
    let mut cost = ndarray::Array2::from_elem((tx, ty), f64::INFINITY);
    for i in 0..tx {
        for j in 0..ty {
            let d = euclidean(x.row(i), y.row(j));
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = cost[[i - 1, j - 1]];
                }
                if i > 0 {
                    best = best.min(cost[[i - 1, j]]);
                }
                if j > 0 {
                    best = best.min(cost[[i, j - 1]]);
                }
                best
            };
            cost[[i, j]] = prev + d;
        }
    }
    let mut path = vec![(tx - 1, ty - 1)];
    let (mut i, mut j) = (tx - 1, ty - 1);
    while i > 0 || j > 0 {
        // prefer the diagonal on ties
        let candidates = [
            (i > 0 && j > 0).then(|| (i - 1, j - 1)),
            (i > 0).then(|| (i - 1, j)),
            (j > 0).then(|| (i, j - 1)),
        ];
        let (ni, nj) = candidates
            .into_iter()
            .flatten()
            .min_by(|a, b| cost[[a.0, a.1]].total_cmp(&cost[[b.0, b.1]]))
            .expect("at least one predecessor");
        i = ni;
        j = nj;
        path.push((i, j));
    }
    path.reverse();
    Ok(DtwResult {
        total_cost: cost[[tx - 1, ty - 1]],
        path,
    })
}

pub fn dtw(x: &MelSpectrogram, y: &MelSpectrogram) -> Result<DtwResult> {
    dtw_frames(x.frames.view(), y.frames.view())
}

/// Mel spectral distortion: DTW cost divided by the frame count of `x`.
pub fn msd(x: &MelSpectrogram, y: &MelSpectrogram) -> Result<f64> {
    Ok(dtw(x, y)?.total_cost / x.n_frames() as f64)
}

fn same_grid(x: &PitchContour, y: &PitchContour) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "pitch contours of {} and {} frames do not share a frame grid",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::invalid("pitch contours are empty"));
    }
    Ok(())
}

/// Frames where exactly one of the contours is unvoiced.
pub fn vde(x: &PitchContour, y: &PitchContour) -> Result<BTreeSet<usize>> {
    same_grid(x, y)?;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .enumerate()
        .filter(|(_, (a, b))| (**a == 0.0) != (**b == 0.0))
        .map(|(t, _)| t)
        .collect())
}

/// Which frames are eligible for a gross pitch error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GpeDefinition {
    /// Every frame: `not (0.8 x_t <= y_t <= 1.2 x_t)`. Frames unvoiced in
    /// `x` but voiced in `y` fall outside the degenerate `[0, 0]` band.
    #[default]
    Literal,
    /// Only frames voiced in both contours (the conventional definition).
    VoicedBoth,
}

pub fn gpe(x: &PitchContour, y: &PitchContour) -> Result<BTreeSet<usize>> {
    gpe_with(x, y, GpeDefinition::Literal)
}

pub fn gpe_with(
    x: &PitchContour,
    y: &PitchContour,
    definition: GpeDefinition,
) -> Result<BTreeSet<usize>> {
    same_grid(x, y)?;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .enumerate()
        .filter(|(_, (&a, &b))| {
            let eligible = match definition {
                GpeDefinition::Literal => true,
                GpeDefinition::VoicedBoth => a > 0.0 && b > 0.0,
            };
            eligible && !(a * 0.8 <= b && b <= a * 1.2)
        })
        .map(|(t, _)| t)
        .collect())
}

/// `|VDE ∪ GPE| / T_x`.
pub fn ffe(x: &PitchContour, y: &PitchContour) -> Result<f64> {
    let union: BTreeSet<usize> = vde(x, y)?.union(&gpe(x, y)?).copied().collect();
    Ok(union.len() as f64 / x.len() as f64)
}

/// Unit-cost edit distance.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Phone error rate: edit distance divided by the reference length.
pub fn per(reference: &PhoneSequence, hypothesis: &PhoneSequence) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::invalid("reference transcript is empty"));
    }
    Ok(levenshtein(&reference.0, &hypothesis.0) as f64 / reference.len() as f64)
}

pub fn cosine_similarity(a: &SpeakerEmbedding, b: &SpeakerEmbedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let dot: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
    let na = a.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::degenerate("cosine similarity of a zero vector"));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// One row of a batch evaluation report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub pair_id: String,
    pub msd: f64,
    pub ffe: f64,
    pub vde_rate: f64,
    pub gpe_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cosine: Option<f64>,
}

/// Batch report; records are kept sorted by `pair_id`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: u32,
    pub records: Vec<EvalRecord>,
}

impl EvalReport {
    pub fn new(mut records: Vec<EvalRecord>) -> Self {
        records.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        Self {
            version: REPORT_FORMAT_VERSION,
            records,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "pair_id", "msd", "ffe", "vde_rate", "gpe_rate", "per", "cosine",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.pair_id.clone(),
                r.msd.to_string(),
                r.ffe.to_string(),
                r.vde_rate.to_string(),
                r.gpe_rate.to_string(),
                opt(r.per),
                opt(r.cosine),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// FFE, VDE rate and GPE rate of `hypothesis` against `reference`, with the hypothesis truncated or
/// padded (unvoiced) to the reference grid first.
pub fn pitch_metrics(
    reference: &PitchContour,
    hypothesis: &PitchContour,
) -> Result<(f64, f64, f64)> {
    let hyp = hypothesis.fit_to_len(reference.len());
    let t = reference.len() as f64;
    Ok((
        ffe(reference, &hyp)?,
        vde(reference, &hyp)?.len() as f64 / t,
        gpe(reference, &hyp)?.len() as f64 / t,
    ))
}

/// MSD, FFE, VDE and GPE rates and stats-embedding cosine for one pair; `per` is left empty.
pub fn evaluate_audio(
    pair_id: &str,
    reference: &AudioBuffer,
    hypothesis: &AudioBuffer,
    frames: &FrameConfig,
    pitch: &PitchConfig,
    n_mels: usize,
) -> Result<EvalRecord> {
    if reference.sample_rate() != hypothesis.sample_rate() {
        return Err(Error::invalid(format!(
            "{pair_id}: sample rates differ ({} vs {})",
            reference.sample_rate(),
            hypothesis.sample_rate()
        )));
    }
    let msd = msd(
        &mel_spectrogram(reference, frames, n_mels)?,
        &mel_spectrogram(hypothesis, frames, n_mels)?,
    )?;
    let (ffe, vde_rate, gpe_rate) = pitch_metrics(
        &estimate_pitch_with(reference, frames, pitch)?,
        &estimate_pitch_with(hypothesis, frames, pitch)?,
    )?;
    let cosine = cosine_similarity(
        &stats_embedding(reference, frames)?,
        &stats_embedding(hypothesis, frames)?,
    )?;
    Ok(EvalRecord {
        pair_id: pair_id.to_string(),
        msd,
        ffe,
        vde_rate,
        gpe_rate,
        per: None,
        cosine: Some(cosine),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::FrameConfig;
    use ndarray::{array, Array2};

    fn pc(v: &[f64]) -> PitchContour {
        PitchContour::new(v.to_vec()).unwrap()
    }

    fn spec(frames: Array2<f64>) -> MelSpectrogram {
        MelSpectrogram {
            frames,
            config: FrameConfig::default(),
        }
    }

    #[test]
    fn dtw_identity_and_unit_distance() {
        let x = spec(array![[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]);
        let r = dtw(&x, &x).unwrap();
        assert_eq!(r.total_cost, 0.0);
        assert_eq!(r.path, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(msd(&x, &x).unwrap(), 0.0);

        let a = spec(array![[0.0, 0.0]]);
        let b = spec(array![[0.0, 1.0]]);
        assert_eq!(dtw(&a, &b).unwrap().total_cost, 1.0);
        assert_eq!(msd(&a, &b).unwrap(), 1.0);
        assert!(dtw(&a, &spec(array![[0.0, 1.0, 2.0]])).is_err());
    }

    #[test]
    fn vde_examples() {
        assert!(vde(&pc(&[100.0, 0.0]), &pc(&[100.0, 0.0]))
            .unwrap()
            .is_empty());
        assert_eq!(
            vde(&pc(&[100.0, 0.0]), &pc(&[100.0, 90.0])).unwrap(),
            BTreeSet::from([1])
        );
        assert!(vde(&pc(&[0.0, 0.0]), &pc(&[0.0, 0.0])).unwrap().is_empty());
        assert!(vde(&pc(&[0.0]), &pc(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn gpe_examples() {
        let x = pc(&[100.0, 0.0, 200.0, 150.0]);
        let y = pc(&[100.0, 90.0, 250.0, 150.0]);
        assert_eq!(gpe(&x, &y).unwrap(), BTreeSet::from([1, 2]));
        assert_eq!(
            gpe_with(&x, &y, GpeDefinition::VoicedBoth).unwrap(),
            BTreeSet::from([2])
        );
        let scaled = pc(&[110.0, 220.0, 165.0]);
        assert!(gpe(&pc(&[100.0, 200.0, 150.0]), &scaled)
            .unwrap()
            .is_empty());
        assert!(gpe(&x, &x).unwrap().is_empty());
    }

    #[test]
    fn ffe_examples() {
        let x = pc(&[100.0, 0.0, 200.0, 150.0]);
        let y = pc(&[100.0, 90.0, 250.0, 150.0]);
        assert_eq!(ffe(&x, &y).unwrap(), 0.5);
        assert_eq!(ffe(&x, &x).unwrap(), 0.0);
        assert_eq!(ffe(&pc(&[100.0, 120.0]), &pc(&[0.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn per_examples() {
        let p = PhoneSequence::parse;
        assert_eq!(per(&p("A B"), &p("A B")).unwrap(), 0.0);
        assert_eq!(per(&p("A B"), &p("A C")).unwrap(), 0.5);
        assert_eq!(per(&p("A B C D"), &p("A X B C")).unwrap(), 0.5);
        assert!(per(&p(""), &p("A")).is_err());
    }

    #[test]
    fn cosine_examples() {
        let e = |v: &[f64]| SpeakerEmbedding::external(v.to_vec()).unwrap();
        assert!((cosine_similarity(&e(&[1.0, 2.0]), &e(&[1.0, 2.0])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            cosine_similarity(&e(&[1.0, 0.0]), &e(&[0.0, 1.0])).unwrap(),
            0.0
        );
        assert!(
            (cosine_similarity(&e(&[1.0, -3.0]), &e(&[2.0, -6.0])).unwrap() - 1.0).abs() < 1e-12
        );
        assert!(matches!(
            cosine_similarity(&e(&[0.0, 0.0]), &e(&[1.0, 0.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(cosine_similarity(&e(&[1.0]), &e(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn report_sorted_and_csv() {
        let rec = |id: &str| EvalRecord {
            pair_id: id.into(),
            msd: 1.0,
            ffe: 0.5,
            vde_rate: 0.25,
            gpe_rate: 0.5,
            per: None,
            cosine: Some(0.9),
        };
        let r = EvalReport::new(vec![rec("b"), rec("a")]);
        assert_eq!(r.records[0].pair_id, "a");
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "a,1,0.5,0.25,0.5,,0.9");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["version"], 1);
        assert!(json["records"][0].get("per").is_none());
    }
}
