//! Toy source–filter renderer and labelled corpus generator.
//!
//! Voiced phones are a band-limited impulse train at the target pitch,
//! unvoiced phones white noise; both pass through two cascaded resonators
//! chosen per phone. Each phone is scaled to unit RMS over its span and then
//! to its target energy, with a short linear crossfade at phone boundaries.
//!
//! Rendered audio is padded so that analysis frame `t` (under the rendering
//! [`FrameConfig`]) is centred on the `t`-th duration frame: a phone with
//! duration `d` occupies exactly `d` analysis frames.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::align::{Alignment, PhoneInventory, PhoneSequence};
use crate::audio::AudioBuffer;
use crate::dsp::FrameConfig;
use crate::error::{Error, Result};
use crate::prosody::{ProsodyTargets, Register};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

/// Crossfade between neighbouring phones, seconds.
const CROSSFADE_S: f64 = 0.005;
/// Filter warm-up rendered and discarded before each phone.
const WARMUP_SAMPLES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
}

impl Resonance {
    pub const fn new(freq_hz: f64, bandwidth_hz: f64) -> Self {
        Self {
            freq_hz,
            bandwidth_hz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhoneTimbre {
    pub voiced: bool,
    pub resonances: [Resonance; 2],
}

/// Spectral shape of every phone in an inventory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhoneTimbreTable {
    entries: BTreeMap<String, PhoneTimbre>,
}

const TOY_TIMBRES: &[(&str, bool, (f64, f64), (f64, f64))] = &[
    ("a", true, (800.0, 80.0), (1300.0, 100.0)),
    ("e", true, (480.0, 70.0), (1950.0, 110.0)),
    ("i", true, (290.0, 60.0), (2450.0, 120.0)),
    ("o", true, (540.0, 80.0), (880.0, 90.0)),
    ("u", true, (320.0, 60.0), (700.0, 90.0)),
    ("m", true, (260.0, 60.0), (2800.0, 300.0)),
    ("s", false, (5200.0, 900.0), (6600.0, 1200.0)),
    ("f", false, (2200.0, 1500.0), (3800.0, 1800.0)),
];

/// The eight-phone inventory covered by [`PhoneTimbreTable::toy`].
pub fn toy_inventory() -> PhoneInventory {
    PhoneInventory::new(TOY_TIMBRES.iter().map(|t| t.0)).expect("toy symbols are unique")
}

impl PhoneTimbreTable {
    pub fn new(entries: BTreeMap<String, PhoneTimbre>) -> Self {
        Self { entries }
    }

    /// Six vowel-like voiced phones and two fricative-like unvoiced ones.
    pub fn toy() -> Self {
        Self {
            entries: TOY_TIMBRES
                .iter()
                .map(|&(name, voiced, r1, r2)| {
                    (
                        name.to_string(),
                        PhoneTimbre {
                            voiced,
                            resonances: [Resonance::new(r1.0, r1.1), Resonance::new(r2.0, r2.1)],
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn get(&self, phone: &str) -> Option<&PhoneTimbre> {
        self.entries.get(phone)
    }

    pub fn is_voiced(&self, phone: &str) -> Option<bool> {
        self.get(phone).map(|t| t.voiced)
    }

    /// Every resonance frequency multiplied by `factor` (a different vocal tract).
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in out.entries.values_mut() {
            for r in &mut t.resonances {
                r.freq_hz *= factor;
            }
        }
        out
    }

    /// Checks that every inventory phone has an entry with resonances below Nyquist.
    pub fn validate(&self, inventory: &PhoneInventory, sample_rate: u32) -> Result<()> {
        for symbol in inventory.symbols() {
            self.check_phone(symbol, sample_rate)?;
        }
        Ok(())
    }

    fn check_phone(&self, phone: &str, sample_rate: u32) -> Result<&PhoneTimbre> {
        let t = self
            .get(phone)
            .ok_or_else(|| Error::invalid(format!("no timbre for phone {phone:?}")))?;
        let nyquist = sample_rate as f64 / 2.0;
        for r in &t.resonances {
            if !(r.freq_hz > 0.0 && r.freq_hz < nyquist && r.bandwidth_hz > 0.0) {
                return Err(Error::invalid(format!(
                    "resonance {} Hz / {} Hz of {phone:?} is not below Nyquist {nyquist} Hz",
                    r.freq_hz, r.bandwidth_hz
                )));
            }
        }
        Ok(t)
    }
}

/// Second-order resonator (Klatt form) with unity gain at DC.
struct Resonator {
    a: f64,
    b: f64,
    c: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(r: &Resonance, sample_rate: f64) -> Self {
        let c = -(-2.0 * PI * r.bandwidth_hz / sample_rate).exp();
        let b = 2.0
            * (-PI * r.bandwidth_hz / sample_rate).exp()
            * (2.0 * PI * r.freq_hz / sample_rate).cos();
        Self {
            a: 1.0 - b - c,
            b,
            c,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn tick(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Sum of all harmonics of `f0` below Nyquist, starting in phase at sample 0.
fn impulse_train(f0: f64, n: usize, sample_rate: f64) -> Vec<f64> {
    let harmonics = ((0.5 * sample_rate - 1.0) / f0).floor().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let phase = 2.0 * PI * f0 * i as f64 / sample_rate;
            let two_cos = 2.0 * phase.cos();
            // Chebyshev recurrence for cos(k * phase)
            let (mut prev, mut cur) = (1.0, phase.cos());
            let mut acc = 0.0;
            for _ in 0..harmonics {
                acc += cur;
                let next = two_cos * cur - prev;
                prev = cur;
                cur = next;
            }
            acc
        })
        .collect()
}

/// Renders `targets` for `phones`. `seed` drives the noise of unvoiced phones.
pub fn render(
    targets: &ProsodyTargets,
    phones: &PhoneSequence,
    timbres: &PhoneTimbreTable,
    config: &FrameConfig,
    sample_rate: u32,
    seed: u64,
) -> Result<AudioBuffer> {
    config.validate()?;
    targets.validate(phones.len())?;
    if phones.is_empty() {
        return Err(Error::invalid("nothing to render"));
    }
    if targets.durations.contains(&0) {
        return Err(Error::invalid(
            "every phone needs a duration of at least one frame",
        ));
    }
    let sr = sample_rate as f64;
    let hop = config.hop_samples(sample_rate);
    let pad = config.centering_pad_samples(sample_rate);
    let total = targets.total_frames() * hop + 2 * pad;

    let mut edges = Vec::with_capacity(phones.len() + 1);
    edges.push(0usize);
    let mut acc = pad;
    for &d in &targets.durations {
        acc += d * hop;
        edges.push(acc);
    }
    *edges.last_mut().expect("non-empty") = total;

    let fade = ((CROSSFADE_S * sr).round() as usize).clamp(2, hop);
    let half = fade / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; total];

    for (i, phone) in phones.iter().enumerate() {
        let timbre = timbres.check_phone(phone, sample_rate)?;
        let (core_lo, core_hi) = (edges[i], edges[i + 1]);
        let lo = if i == 0 { 0 } else { core_lo - half };
        let hi = if i + 1 == phones.len() {
            total
        } else {
            (core_hi + half).min(total)
        };
        let len = hi - lo + WARMUP_SAMPLES;

        let f0 = targets.pitch_hz[i];
        if !(f0 >= 0.0) {
            return Err(Error::invalid(format!(
                "phone {i} ({phone}) has pitch {f0}"
            )));
        }
        // a voiced phone with pitch 0 is whispered
        let mut source = if timbre.voiced && f0 > 0.0 {
            if f0 >= sr / 2.0 {
                return Err(Error::invalid(format!(
                    "pitch {f0} Hz of phone {i} is above Nyquist"
                )));
            }
            impulse_train(f0, len, sr)
        } else {
            (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        for r in &timbre.resonances {
            let mut filt = Resonator::new(r, sr);
            source.iter_mut().for_each(|x| *x = filt.tick(*x));
        }
        let signal = &source[WARMUP_SAMPLES..];

        let core = &signal[core_lo - lo..core_hi - lo];
        let rms = (core.iter().map(|x| x * x).sum::<f64>() / core.len() as f64).sqrt();
        let gain = if rms > 0.0 {
            targets.energy[i] / rms
        } else {
            0.0
        };

        for (k, &x) in signal.iter().enumerate() {
            let n = lo + k;
            let mut w = 1.0;
            if i > 0 && n < core_lo + half {
                w = (n + half - core_lo) as f64 / fade as f64;
            }
            if i + 1 < phones.len() && n + half >= core_hi {
                w = w.min((core_hi + half - n) as f64 / fade as f64);
            }
            out[n] += w.clamp(0.0, 1.0) * gain * x;
        }
    }
    out.iter_mut().for_each(|s| *s = s.clamp(-1.0, 1.0));
    AudioBuffer::new(out, sample_rate)
}

/// A synthetic speaker: vocal-tract scale and absolute register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Voice {
    pub name: String,
    pub timbre_scale: f64,
    pub register: Register,
}

impl Voice {
    pub fn low() -> Self {
        Self {
            name: "low".into(),
            timbre_scale: 1.0,
            register: Register {
                pitch_mean_hz: 110.0,
                energy_mean: 0.05,
            },
        }
    }

    pub fn high() -> Self {
        Self {
            name: "high".into(),
            timbre_scale: 1.15,
            register: Register {
                pitch_mean_hz: 210.0,
                energy_mean: 0.04,
            },
        }
    }
}

/// Ranges from which toy utterances are drawn.
///
/// Per utterance: `phones` phones without immediate repeats (at least one
/// voiced); per phone: a duration in `duration_frames`, an energy factor in
/// `energy_factor` times the voice's energy mean, and for voiced phones a
/// pitch factor that random-walks by a ratio in `pitch_step` and is clamped
/// to `pitch_factor`, times the voice's pitch mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyCorpusConfig {
    pub inventory: PhoneInventory,
    pub timbres: PhoneTimbreTable,
    pub voices: Vec<Voice>,
    pub sample_rate: u32,
    pub frames: FrameConfig,
    pub phones: (usize, usize),
    pub duration_frames: (usize, usize),
    pub pitch_factor: (f64, f64),
    pub pitch_step: (f64, f64),
    pub energy_factor: (f64, f64),
}

impl ToyCorpusConfig {
    /// Defaults over the toy timbres with the `low` and `high` voices alternating.
    pub fn new(inventory: PhoneInventory) -> Result<Self> {
        let cfg = Self {
            inventory,
            timbres: PhoneTimbreTable::toy(),
            voices: vec![Voice::low(), Voice::high()],
            sample_rate: 16000,
            frames: FrameConfig::default(),
            phones: (4, 8),
            duration_frames: (6, 16),
            pitch_factor: (0.7, 1.4),
            pitch_step: (0.85, 1.18),
            energy_factor: (0.6, 1.5),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_voices(mut self, voices: Vec<Voice>) -> Result<Self> {
        self.voices = voices;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.voices.is_empty() {
            return Err(Error::invalid("toy corpus needs at least one voice"));
        }
        for v in &self.voices {
            v.register.validate()?;
            self.timbres
                .scaled(v.timbre_scale)
                .validate(&self.inventory, self.sample_rate)?;
        }
        if !self
            .inventory
            .symbols()
            .iter()
            .any(|s| self.timbres.is_voiced(s) == Some(true))
        {
            return Err(Error::invalid("inventory has no voiced phone"));
        }
        let ok = self.phones.0 >= 1
            && self.phones.0 <= self.phones.1
            && self.duration_frames.0 >= 1
            && self.duration_frames.0 <= self.duration_frames.1
            && 0.0 < self.pitch_factor.0
            && self.pitch_factor.0 <= self.pitch_factor.1
            && 0.0 < self.pitch_step.0
            && self.pitch_step.0 <= self.pitch_step.1
            && 0.0 < self.energy_factor.0
            && self.energy_factor.0 <= self.energy_factor.1;
        if !ok {
            return Err(Error::invalid(
                "toy corpus ranges must be positive and ordered",
            ));
        }
        self.frames.validate()
    }
}

/// One generated utterance with its exact ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyUtterance {
    pub id: String,
    pub voice: usize,
    pub audio: AudioBuffer,
    pub phones: PhoneSequence,
    pub alignment: Alignment,
    pub targets: ProsodyTargets,
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Draws one utterance's transcript and targets for `voice`.
pub fn random_script(
    config: &ToyCorpusConfig,
    voice: &Voice,
    rng: &mut ChaCha8Rng,
) -> (PhoneSequence, ProsodyTargets) {
    let symbols = config.inventory.symbols();
    let n = rng.gen_range(config.phones.0..=config.phones.1);
    let mut phones: Vec<String> = Vec::with_capacity(n);
    while phones.len() < n {
        let s = &symbols[rng.gen_range(0..symbols.len())];
        if phones.last() != Some(s) || symbols.len() == 1 {
            phones.push(s.clone());
        }
    }
    let voiced = |p: &str| config.timbres.is_voiced(p).unwrap_or(false);
    if !phones.iter().any(|p| voiced(p)) {
        let candidates: Vec<&String> = symbols.iter().filter(|s| voiced(s)).collect();
        let slot = rng.gen_range(0..n);
        let mut pick = candidates[rng.gen_range(0..candidates.len())].clone();
        // keep neighbours distinct when possible
        for c in &candidates {
            let clash =
                (slot > 0 && &phones[slot - 1] == *c) || (slot + 1 < n && &phones[slot + 1] == *c);
            if !clash {
                pick = (*c).clone();
                break;
            }
        }
        phones[slot] = pick;
    }

    let mut factor = uniform(rng, (0.85, 1.15)).clamp(config.pitch_factor.0, config.pitch_factor.1);
    let mut targets = ProsodyTargets {
        durations: Vec::with_capacity(n),
        pitch_hz: Vec::with_capacity(n),
        energy: Vec::with_capacity(n),
    };
    for p in &phones {
        targets
            .durations
            .push(rng.gen_range(config.duration_frames.0..=config.duration_frames.1));
        targets
            .energy
            .push(voice.register.energy_mean * uniform(rng, config.energy_factor));
        if voiced(p) {
            targets.pitch_hz.push(voice.register.pitch_mean_hz * factor);
            factor = (factor * uniform(rng, config.pitch_step))
                .clamp(config.pitch_factor.0, config.pitch_factor.1);
        } else {
            targets.pitch_hz.push(0.0);
        }
    }
    (PhoneSequence(phones), targets)
}

/// Renders `targets` in `voice` using the corpus's timbres and framing.
pub fn render_voice(
    config: &ToyCorpusConfig,
    voice: &Voice,
    phones: &PhoneSequence,
    targets: &ProsodyTargets,
    seed: u64,
) -> Result<AudioBuffer> {
    render(
        targets,
        phones,
        &config.timbres.scaled(voice.timbre_scale),
        &config.frames,
        config.sample_rate,
        seed,
    )
}

/// `n` utterances cycling through the configured voices; reproducible per seed.
pub fn make_toy_corpus_with(
    config: &ToyCorpusConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<ToyUtterance>> {
    if n == 0 {
        return Err(Error::invalid("corpus size must be at least 1"));
    }
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let voice_idx = k % config.voices.len();
            let voice = &config.voices[voice_idx];
            let (phones, targets) = random_script(config, voice, &mut rng);
            let noise_seed = rng.gen();
            let audio = render_voice(config, voice, &phones, &targets, noise_seed)?;
            Ok(ToyUtterance {
                id: format!("utt{k:04}"),
                voice: voice_idx,
                alignment: Alignment::from_durations(&targets.durations)?,
                audio,
                phones,
                targets,
            })
        })
        .collect()
}

pub fn make_toy_corpus(
    n: usize,
    inventory: &PhoneInventory,
    seed: u64,
) -> Result<Vec<ToyUtterance>> {
    make_toy_corpus_with(&ToyCorpusConfig::new(inventory.clone())?, n, seed)
}

/// One utterance entry of a corpus manifest; paths are relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub wav: PathBuf,
    pub phones: PhoneSequence,
    pub voice: String,
    pub alignment_csv: PathBuf,
    pub targets_json: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub version: u32,
    pub seed: u64,
    pub sample_rate: u32,
    pub frames: FrameConfig,
    pub inventory: PhoneInventory,
    pub voices: Vec<Voice>,
    pub utterances: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self = serde_json::from_str(&text)?;
        if m.version != MANIFEST_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: MANIFEST_FORMAT_VERSION,
                found: m.version,
            });
        }
        Ok(m)
    }
}

/// Writes WAVs, ground-truth alignments/targets and `manifest.json` into `dir`.
pub fn write_corpus(
    corpus: &[ToyUtterance],
    config: &ToyCorpusConfig,
    seed: u64,
    dir: impl AsRef<Path>,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(corpus.len());
    for u in corpus {
        let wav = PathBuf::from(format!("{}.wav", u.id));
        let alignment_csv = PathBuf::from(format!("{}.align.csv", u.id));
        let targets_json = PathBuf::from(format!("{}.targets.json", u.id));
        u.audio.write_wav(dir.join(&wav))?;
        let path = dir.join(&alignment_csv);
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        u.alignment.write_csv(&u.phones, file)?;
        let path = dir.join(&targets_json);
        std::fs::write(&path, serde_json::to_string_pretty(&u.targets)?)
            .map_err(|e| Error::io(&path, e))?;
        entries.push(ManifestEntry {
            id: u.id.clone(),
            wav,
            phones: u.phones.clone(),
            voice: config.voices[u.voice].name.clone(),
            alignment_csv,
            targets_json,
        });
    }
    let manifest = CorpusManifest {
        version: MANIFEST_FORMAT_VERSION,
        seed,
        sample_rate: config.sample_rate,
        frames: config.frames,
        inventory: config.inventory.clone(),
        voices: config.voices.clone(),
        utterances: entries,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{estimate_pitch, frame_energy};

    fn one_phone(phone: &str, pitch: f64, frames: usize) -> AudioBuffer {
        let targets = ProsodyTargets {
            durations: vec![frames],
            pitch_hz: vec![pitch],
            energy: vec![0.05],
        };
        render(
            &targets,
            &PhoneSequence::parse(phone),
            &PhoneTimbreTable::toy(),
            &FrameConfig::default(),
            16000,
            3,
        )
        .unwrap()
    }

    #[test]
    fn duration_arithmetic() {
        let targets = ProsodyTargets {
            durations: vec![5, 5],
            pitch_hz: vec![120.0, 0.0],
            energy: vec![0.05, 0.05],
        };
        let cfg = FrameConfig::default();
        let audio = render(
            &targets,
            &PhoneSequence::parse("a s"),
            &PhoneTimbreTable::toy(),
            &cfg,
            16000,
            1,
        )
        .unwrap();
        assert!((audio.duration_s() - 0.1).abs() <= cfg.frame_length_s);
        assert_eq!(cfg.n_frames(audio.len(), 16000).unwrap(), 10);
    }

    #[test]
    fn voiced_pitch_reads_back() {
        let audio = one_phone("a", 200.0, 40);
        let f0 = estimate_pitch(&audio, &FrameConfig::default(), 60.0, 400.0).unwrap();
        for &f in &f0.values()[3..37] {
            assert!((f - 200.0).abs() <= 2.0, "{f}");
        }
    }

    #[test]
    fn energy_reads_back() {
        let audio = one_phone("e", 130.0, 30);
        let e = frame_energy(&audio, &FrameConfig::default()).unwrap();
        let interior = &e.values()[2..28];
        let mean = interior.iter().sum::<f64>() / interior.len() as f64;
        assert!((mean - 0.05).abs() < 0.005, "{mean}");
    }

    #[test]
    fn zero_energy_is_silent() {
        let targets = ProsodyTargets {
            durations: vec![4, 4],
            pitch_hz: vec![100.0, 0.0],
            energy: vec![0.0, 0.0],
        };
        let audio = render(
            &targets,
            &PhoneSequence::parse("a f"),
            &PhoneTimbreTable::toy(),
            &FrameConfig::default(),
            16000,
            9,
        )
        .unwrap();
        assert!(audio.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn voiced_phone_without_pitch_is_whispered() {
        let mut targets = ProsodyTargets {
            durations: vec![30],
            pitch_hz: vec![0.0],
            energy: vec![0.05],
        };
        let cfg = FrameConfig::default();
        let audio = render(
            &targets,
            &PhoneSequence::parse("a"),
            &PhoneTimbreTable::toy(),
            &cfg,
            16000,
            0,
        )
        .unwrap();
        assert!(audio.samples().iter().any(|&s| s != 0.0));
        targets.pitch_hz[0] = -1.0;
        let err = render(
            &targets,
            &PhoneSequence::parse("a"),
            &PhoneTimbreTable::toy(),
            &cfg,
            16000,
            0,
        );
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn corpus_is_reproducible_and_consistent() {
        let inv = toy_inventory();
        let a = make_toy_corpus(4, &inv, 7).unwrap();
        let b = make_toy_corpus(4, &inv, 7).unwrap();
        assert_eq!(a, b);
        let cfg = FrameConfig::default();
        for u in &a {
            assert_eq!(
                u.alignment.n_frames(),
                cfg.n_frames(u.audio.len(), 16000).unwrap()
            );
            assert_eq!(u.alignment.durations(), u.targets.durations);
            assert!(u.phones.0.windows(2).all(|w| w[0] != w[1]));
        }
        assert!(make_toy_corpus(0, &inv, 7).is_err());
    }

    #[test]
    fn missing_timbre_is_rejected() {
        let inv = PhoneInventory::new(["a", "zh"]).unwrap();
        assert!(ToyCorpusConfig::new(inv).is_err());
    }
}
