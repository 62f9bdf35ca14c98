//! Generates a small two-voice corpus with ground-truth alignments and writes it to disk.
//!
//! ```text
//! cargo run --example toy_corpus -- /tmp/toy
//! ```

use prosody_clone::synth::{make_toy_corpus_with, toy_inventory, write_corpus, ToyCorpusConfig};

fn main() -> prosody_clone::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("toy-corpus")
            .display()
            .to_string()
    });
    let config = ToyCorpusConfig::new(toy_inventory())?;
    let corpus = make_toy_corpus_with(&config, 6, 1)?;
    for u in &corpus {
        println!(
            "{} [{}] {:.2}s  {}",
            u.id,
            config.voices[u.voice].name,
            u.audio.duration_s(),
            u.phones.iter().collect::<Vec<_>>().join(" ")
        );
        println!("    durations {:?}", u.targets.durations);
        println!(
            "    pitch     {:?}",
            u.targets
                .pitch_hz
                .iter()
                .map(|p| p.round())
                .collect::<Vec<_>>()
        );
    }
    let manifest = write_corpus(&corpus, &config, 1, &dir)?;
    println!("manifest: {}", manifest.display());
    Ok(())
}
