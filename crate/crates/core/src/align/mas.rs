//! Monotonic alignment search over phone posteriors, the [`Alignment`] type
//! and boundary averaging across alignment ensembles.

use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{PhoneInventory, PhoneSequence};

/// Per-frame distributions over `blank + symbols`, one row per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Posteriorgram {
    probs: Array2<f64>,
}

impl Posteriorgram {
    pub fn new(probs: Array2<f64>) -> Result<Self> {
        if probs.nrows() == 0 || probs.ncols() == 0 {
            return Err(Error::invalid("posteriorgram is empty"));
        }
        for (t, row) in probs.rows().into_iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                return Err(Error::invalid(format!(
                    "posteriorgram row {t} has invalid entries"
                )));
            }
            let sum = row.sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::invalid(format!(
                    "posteriorgram row {t} sums to {sum}"
                )));
            }
        }
        Ok(Self { probs })
    }

    pub fn from_log_probs(log_probs: &Array2<f64>) -> Result<Self> {
        Self::new(log_probs.mapv(f64::exp))
    }

    pub fn probs(&self) -> ArrayView2<'_, f64> {
        self.probs.view()
    }

    pub fn n_frames(&self) -> usize {
        self.probs.nrows()
    }

    /// CSV with a `frame` column followed by one column per class.
    pub fn write_csv<W: Write>(&self, inventory: &PhoneInventory, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["frame".to_string(), "<blank>".to_string()];
        header.extend(inventory.symbols().iter().cloned());
        w.write_record(&header)?;
        for (t, row) in self.probs.rows().into_iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|p| p.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Contiguous, monotone partition of `0..n_frames` into one non-empty
/// half-open span per phone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    spans: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(spans: Vec<(usize, usize)>) -> Result<Self> {
        if spans.is_empty() {
            return Err(Error::invalid("alignment has no spans"));
        }
        if spans[0].0 != 0 {
            return Err(Error::invalid("first span must start at frame 0"));
        }
        for (i, &(start, end)) in spans.iter().enumerate() {
            if end <= start {
                return Err(Error::invalid(format!(
                    "span {i} ({start}, {end}) is empty"
                )));
            }
            if i > 0 && spans[i - 1].1 != start {
                return Err(Error::invalid(format!(
                    "span {i} does not start where span {} ends",
                    i - 1
                )));
            }
        }
        Ok(Self { spans })
    }

    /// Consecutive spans with the given frame counts.
    pub fn from_durations(durations: &[usize]) -> Result<Self> {
        let mut start = 0;
        let spans = durations
            .iter()
            .map(|&d| {
                let span = (start, start + d);
                start += d;
                span
            })
            .collect();
        Self::new(spans)
    }

    /// Spans from interior boundaries and the total frame count.
    pub fn from_boundaries(boundaries: &[usize], n_frames: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(boundaries.len() + 2);
        edges.push(0);
        edges.extend_from_slice(boundaries);
        edges.push(n_frames);
        Self::new(edges.windows(2).map(|w| (w[0], w[1])).collect())
    }

    pub fn spans(&self) -> &[(usize, usize)] {
        &self.spans
    }

    pub fn n_phones(&self) -> usize {
        self.spans.len()
    }

    pub fn n_frames(&self) -> usize {
        self.spans.last().map_or(0, |s| s.1)
    }

    pub fn durations(&self) -> Vec<usize> {
        self.spans.iter().map(|(s, e)| e - s).collect()
    }

    /// Start frames of every phone after the first.
    pub fn boundaries(&self) -> Vec<usize> {
        self.spans.iter().skip(1).map(|s| s.0).collect()
    }

    /// Phone index owning each frame.
    pub fn frame_labels(&self) -> Vec<usize> {
        self.spans
            .iter()
            .enumerate()
            .flat_map(|(i, &(s, e))| std::iter::repeat_n(i, e - s))
            .collect()
    }

    /// Mean absolute difference of interior boundaries, in frames.
    pub fn boundary_error(&self, other: &Alignment) -> Result<f64> {
        if self.n_phones() != other.n_phones() {
            return Err(Error::invalid(format!(
                "cannot compare alignments of {} and {} phones",
                self.n_phones(),
                other.n_phones()
            )));
        }
        let a = self.boundaries();
        if a.is_empty() {
            return Ok(0.0);
        }
        let b = other.boundaries();
        Ok(a.iter()
            .zip(&b)
            .map(|(x, y)| x.abs_diff(*y) as f64)
            .sum::<f64>()
            / a.len() as f64)
    }

    /// CSV `phone,start_frame,end_frame`.
    pub fn write_csv<W: Write>(&self, phones: &PhoneSequence, out: W) -> Result<()> {
        if phones.len() != self.n_phones() {
            return Err(Error::invalid(format!(
                "{} phones for {} spans",
                phones.len(),
                self.n_phones()
            )));
        }
        let mut w = csv::Writer::from_writer(out);
        for (phone, &(start_frame, end_frame)) in phones.iter().zip(&self.spans) {
            w.serialize(SpanRow {
                phone: phone.to_string(),
                start_frame,
                end_frame,
            })?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<(PhoneSequence, Alignment)> {
        let mut r = csv::Reader::from_reader(input);
        let mut phones = Vec::new();
        let mut spans = Vec::new();
        for row in r.deserialize::<SpanRow>() {
            let row = row?;
            phones.push(row.phone);
            spans.push((row.start_frame, row.end_frame));
        }
        Ok((PhoneSequence(phones), Alignment::new(spans)?))
    }
}

#[derive(Serialize, Deserialize)]
struct SpanRow {
    phone: String,
    start_frame: usize,
    end_frame: usize,
}

/// Maximum-score monotone partition of the rows of a `T x N` score matrix
/// into `N` non-empty consecutive spans. Returns the alignment and its score.
///
/// Ties in the backtrace keep the current phone.
pub fn mas_from_scores(scores: ArrayView2<f64>) -> Result<(Alignment, f64)> {
    let (frames, phones) = scores.dim();
    if phones == 0 {
        return Err(Error::invalid("alignment target is empty"));
    }
    if frames < phones {
        return Err(Error::Infeasible {
            frames,
            required: phones,
        });
    }
    if scores.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("score matrix contains NaN"));
    }
    let mut best = Array2::from_elem((frames, phones), f64::NEG_INFINITY);
    best[[0, 0]] = scores[[0, 0]];
    for t in 1..frames {
        // phone j needs j frames before it and (phones - 1 - j) after it
        let lo = phones.saturating_sub(frames - t);
        let hi = (phones - 1).min(t);
        for j in lo..=hi {
            let stay = best[[t - 1, j]];
            let advance = if j > 0 {
                best[[t - 1, j - 1]]
            } else {
                f64::NEG_INFINITY
            };
            best[[t, j]] = stay.max(advance) + scores[[t, j]];
        }
    }
    let total = best[[frames - 1, phones - 1]];

    let mut boundaries = Vec::with_capacity(phones - 1);
    let mut j = phones - 1;
    for t in (1..frames).rev() {
        if j == 0 {
            break;
        }
        let stay = best[[t - 1, j]];
        let advance = best[[t - 1, j - 1]];
        // j frames are needed for phones 0..j, so once t == j we must advance
        if advance > stay || t == j {
            boundaries.push(t);
            j -= 1;
        }
    }
    boundaries.reverse();
    Ok((Alignment::from_boundaries(&boundaries, frames)?, total))
}

/// Log-score matrix `T x N` selecting, in transcript order, the posterior
/// column of each target phone. The blank column is dropped.
pub fn target_scores(post: &Posteriorgram, target: &[usize]) -> Result<Array2<f64>> {
    let classes = post.probs.ncols();
    if let Some(&c) = target.iter().find(|&&c| c >= classes) {
        return Err(Error::invalid(format!(
            "class {c} outside {classes} posterior columns"
        )));
    }
    let mut scores = Array2::zeros((post.n_frames(), target.len()));
    for (j, &c) in target.iter().enumerate() {
        for t in 0..post.n_frames() {
            scores[[t, j]] = post.probs[[t, c]].max(f64::MIN_POSITIVE).ln();
        }
    }
    Ok(scores)
}

/// Monotonic alignment search of `target` (class indices) through `post`.
pub fn mas_decode(post: &Posteriorgram, target: &[usize]) -> Result<Alignment> {
    if target.is_empty() {
        return Err(Error::invalid("alignment target is empty"));
    }
    if post.n_frames() < target.len() {
        return Err(Error::Infeasible {
            frames: post.n_frames(),
            required: target.len(),
        });
    }
    mas_from_scores(target_scores(post, target)?.view()).map(|(a, _)| a)
}

/// Sum of `scores[t, phone(t)]` along an alignment.
pub fn alignment_score(scores: ArrayView2<f64>, alignment: &Alignment) -> f64 {
    alignment
        .frame_labels()
        .iter()
        .enumerate()
        .fold(0.0, |acc, (t, &j)| acc + scores[[t, j]])
}

/// Averages corresponding interior boundaries (rounded) across alignments of
/// the same phone count and frame count.
pub fn ensemble_boundaries(alignments: &[Alignment]) -> Result<Alignment> {
    let first = alignments
        .first()
        .ok_or_else(|| Error::invalid("no alignments to average"))?;
    let (phones, frames) = (first.n_phones(), first.n_frames());
    for a in alignments {
        if a.n_phones() != phones || a.n_frames() != frames {
            return Err(Error::invalid(format!(
                "alignment with {} phones / {} frames does not match {phones} phones / {frames} frames",
                a.n_phones(),
                a.n_frames()
            )));
        }
    }
    let n = alignments.len() as f64;
    let boundaries: Vec<usize> = (0..phones - 1)
        .map(|i| {
            let mean = alignments
                .iter()
                .map(|a| a.spans[i + 1].0 as f64)
                .sum::<f64>()
                / n;
            mean.round() as usize
        })
        .collect();
    Alignment::from_boundaries(&boundaries, frames)
}
