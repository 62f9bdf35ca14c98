//! CTC negative log-likelihood and its gradient by forward–backward.
//!
//! `log_probs` is a `T x C` matrix of per-frame log-probabilities (rows need
//! not be normalized; the loss treats every entry as a free input). Labels are
//! class indices in `0..C`, none of which may equal `blank`.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Minimum number of frames a CTC path for `target` needs: one per label
/// plus a separating blank between equal neighbours.
pub fn min_frames(target: &[usize]) -> usize {
    target.len() + target.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Blank-interleaved target `[b, l1, b, l2, ..., lN, b]`.
fn extend(target: &[usize], blank: usize) -> Vec<usize> {
    let mut ext = Vec::with_capacity(2 * target.len() + 1);
    ext.push(blank);
    for &l in target {
        ext.push(l);
        ext.push(blank);
    }
    ext
}

fn validate(log_probs: &ArrayView2<f64>, target: &[usize], blank: usize) -> Result<()> {
    let (frames, classes) = log_probs.dim();
    if blank >= classes {
        return Err(Error::invalid(format!(
            "blank {blank} outside {classes} classes"
        )));
    }
    if let Some(&l) = target.iter().find(|&&l| l >= classes || l == blank) {
        return Err(Error::invalid(format!(
            "target label {l} is blank or outside {classes} classes"
        )));
    }
    if log_probs.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::invalid("log-probabilities contain NaN or +inf"));
    }
    let required = min_frames(target);
    if frames < required || frames == 0 {
        return Err(Error::Infeasible {
            frames,
            required: required.max(1),
        });
    }
    Ok(())
}

/// `alpha[t][s]`: log-mass of all prefixes ending in extended state `s` at frame `t`.
fn forward(log_probs: &ArrayView2<f64>, ext: &[usize]) -> Array2<f64> {
    let frames = log_probs.nrows();
    let states = ext.len();
    let mut alpha = Array2::from_elem((frames, states), f64::NEG_INFINITY);
    alpha[[0, 0]] = log_probs[[0, ext[0]]];
    if states > 1 {
        alpha[[0, 1]] = log_probs[[0, ext[1]]];
    }
    for t in 1..frames {
        for s in 0..states {
            let mut acc = alpha[[t - 1, s]];
            if s >= 1 {
                acc = log_add(acc, alpha[[t - 1, s - 1]]);
            }
            if s >= 2 && ext[s] != ext[0] && ext[s] != ext[s - 2] {
                acc = log_add(acc, alpha[[t - 1, s - 2]]);
            }
            alpha[[t, s]] = acc + log_probs[[t, ext[s]]];
        }
    }
    alpha
}

/// `beta[t][s]`: log-mass of all suffixes starting in state `s` at frame `t`
/// (including frame `t`'s emission).
fn backward(log_probs: &ArrayView2<f64>, ext: &[usize]) -> Array2<f64> {
    let frames = log_probs.nrows();
    let states = ext.len();
    let mut beta = Array2::from_elem((frames, states), f64::NEG_INFINITY);
    beta[[frames - 1, states - 1]] = log_probs[[frames - 1, ext[states - 1]]];
    if states > 1 {
        beta[[frames - 1, states - 2]] = log_probs[[frames - 1, ext[states - 2]]];
    }
    for t in (0..frames - 1).rev() {
        for s in 0..states {
            let mut acc = beta[[t + 1, s]];
            if s + 1 < states {
                acc = log_add(acc, beta[[t + 1, s + 1]]);
            }
            if s + 2 < states && ext[s] != ext[0] && ext[s] != ext[s + 2] {
                acc = log_add(acc, beta[[t + 1, s + 2]]);
            }
            beta[[t, s]] = acc + log_probs[[t, ext[s]]];
        }
    }
    beta
}

fn total_log_likelihood(alpha: &Array2<f64>) -> f64 {
    let (frames, states) = alpha.dim();
    let last = alpha[[frames - 1, states - 1]];
    if states > 1 {
        log_add(last, alpha[[frames - 1, states - 2]])
    } else {
        last
    }
}

/// `-log` of the summed probability of every path that collapses to `target`.
pub fn ctc_loss(log_probs: ArrayView2<f64>, target: &[usize], blank: usize) -> Result<f64> {
    validate(&log_probs, target, blank)?;
    let ext = extend(target, blank);
    Ok(-total_log_likelihood(&forward(&log_probs, &ext)))
}

/// Loss together with `d loss / d log_probs`.
///
/// The gradient entry `(t, k)` is minus the posterior probability that a
/// path emits class `k` at frame `t`, so every row sums to `-1`.
pub fn ctc_loss_and_gradient(
    log_probs: ArrayView2<f64>,
    target: &[usize],
    blank: usize,
) -> Result<(f64, Array2<f64>)> {
    validate(&log_probs, target, blank)?;
    let ext = extend(target, blank);
    let alpha = forward(&log_probs, &ext);
    let beta = backward(&log_probs, &ext);
    let ll = total_log_likelihood(&alpha);
    if ll == f64::NEG_INFINITY {
        return Err(Error::degenerate("every CTC path has zero probability"));
    }
    let mut grad = Array2::zeros(log_probs.raw_dim());
    for t in 0..log_probs.nrows() {
        for (s, &class) in ext.iter().enumerate() {
            let occupancy = alpha[[t, s]] + beta[[t, s]] - log_probs[[t, class]] - ll;
            if occupancy > f64::NEG_INFINITY {
                grad[[t, class]] -= occupancy.exp();
            }
        }
    }
    Ok((-ll, grad))
}

pub fn ctc_gradient(
    log_probs: ArrayView2<f64>,
    target: &[usize],
    blank: usize,
) -> Result<Array2<f64>> {
    ctc_loss_and_gradient(log_probs, target, blank).map(|(_, g)| g)
}

/// Row-wise log-softmax.
pub fn log_softmax(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        row.mapv_inplace(|v| v - lse);
    }
    out
}

/// Gradient with respect to pre-softmax logits: `softmax - occupancy`.
pub fn ctc_logit_gradient(
    log_probs: &Array2<f64>,
    target: &[usize],
    blank: usize,
) -> Result<(f64, Array2<f64>)> {
    let (loss, grad) = ctc_loss_and_gradient(log_probs.view(), target, blank)?;
    Ok((loss, log_probs.mapv(f64::exp) + grad))
}
