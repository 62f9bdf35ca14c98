//! Stats-baseline speaker embeddings: within-voice vs across-voice similarity.

use prosody_clone::embed::{parse_embedding, stats_embedding};
use prosody_clone::metrics::cosine_similarity;
use prosody_clone::synth::{make_toy_corpus_with, toy_inventory, ToyCorpusConfig};

fn main() -> prosody_clone::Result<()> {
    let config = ToyCorpusConfig::new(toy_inventory())?;
    let corpus = make_toy_corpus_with(&config, 24, 5)?;
    let embeddings = corpus
        .iter()
        .map(|u| stats_embedding(&u.audio, &config.frames))
        .collect::<prosody_clone::Result<Vec<_>>>()?;
    let (mut within, mut across) = (Vec::new(), Vec::new());
    for i in 0..corpus.len() {
        for j in i + 1..corpus.len() {
            let c = cosine_similarity(&embeddings[i], &embeddings[j])?;
            if corpus[i].voice == corpus[j].voice {
                within.push(c);
            } else {
                across.push(c);
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "dim {}  within {:.4}  across {:.4}",
        embeddings[0].dim(),
        mean(&within),
        mean(&across)
    );

    // externally computed vectors come in as JSON or flat CSV
    let ext = parse_embedding("0.1, 0.4, -0.2, 0.9")?;
    println!("{}", ext.to_json()?);
    Ok(())
}
