//! Command-line front end: corpus generation, aligner training, signature
//! extraction, cloned rendering and batch evaluation.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 infeasible or
//! degenerate computation, 3 I/O.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{
    finetune_aligner, recognize, train_aligner, AlignerModel, Alignment, PhoneSequence,
    TrainConfig, TrainReport, TrainingSample,
};
use crate::audio::AudioBuffer;
use crate::dsp::{FrameConfig, PitchConfig};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_audio, per, EvalRecord, EvalReport};
use crate::prosody::{
    apply_signature, clone_prosody, extract, register_from_audio_with, ProsodyPredictor,
    ProsodySignature, ProsodyTargets, Register, StatsBaselinePredictor,
};
use crate::synth::{
    make_toy_corpus_with, render, write_corpus, CorpusManifest, PhoneTimbreTable, ToyCorpusConfig,
};

/// Environment variable holding the default `--config` path.
pub const CONFIG_ENV: &str = "PROSODY_CLONE_CONFIG";
pub const RUN_CONFIG_FORMAT_VERSION: u32 = 1;

/// Every knob a command reads. Serialized next to each output together with
/// the resolved input and output paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub version: u32,
    pub frames: FrameConfig,
    pub pitch: PitchConfig,
    pub aligner: TrainConfig,
    pub finetune_steps: usize,
    /// Seed for corpus generation and rendering noise.
    pub seed: u64,
    pub sample_rate: u32,
    /// Mel bands of the spectra compared by MSD.
    pub n_mels: usize,
    pub inputs: BTreeMap<String, PathBuf>,
    pub outputs: BTreeMap<String, PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: RUN_CONFIG_FORMAT_VERSION,
            frames: FrameConfig::default(),
            pitch: PitchConfig::default(),
            aligner: TrainConfig::default(),
            finetune_steps: 10,
            seed: 0,
            sample_rate: 16000,
            n_mels: 40,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        if cfg.version != RUN_CONFIG_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: RUN_CONFIG_FORMAT_VERSION,
                found: cfg.version,
            });
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.frames.validate()?;
        self.pitch.validate(self.sample_rate)?;
        if self.sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if self.n_mels == 0 {
            return Err(Error::invalid("n_mels must be positive"));
        }
        let a = &self.aligner;
        if !(a.learning_rate > 0.0 && a.learning_rate.is_finite()) {
            return Err(Error::invalid("aligner learning rate must be positive"));
        }
        if a.hidden.contains(&0) {
            return Err(Error::invalid("hidden layers must have at least one unit"));
        }
        if a.features.n_mfcc == 0 || a.features.n_mfcc > a.features.n_mels {
            return Err(Error::invalid("need 0 < n_mfcc <= n_mels"));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    version: u32,
    command: &'a str,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<serde_json::Value>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?).map_err(|e| Error::io(path, e))
}

fn check_fresh(paths: &[&Path], force: bool) -> Result<()> {
    if force {
        return Ok(());
    }
    match paths.iter().find(|p| p.exists()) {
        Some(p) => Err(Error::invalid(format!(
            "{} already exists; pass --force to overwrite",
            p.display()
        ))),
        None => Ok(()),
    }
}

/// `dir/stem.<suffix>` next to `out`.
fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

#[derive(Debug, Parser)]
#[command(
    name = "prosody-clone",
    version,
    about = "Phone-level prosody extraction, cloning and evaluation"
)]
struct Cli {
    /// JSON run configuration; built-in defaults apply when absent.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a toy corpus: WAVs, ground-truth alignments and manifest.json.
    Corpus(CorpusArgs),
    /// Train the CTC aligner on a corpus manifest.
    TrainAlign(TrainArgs),
    /// Extract a prosody signature from one recording.
    Extract(ExtractArgs),
    /// Render a signature with a target register.
    CloneRender(CloneArgs),
    /// Compare reference and synthesized audio (files or directories).
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Model file (JSON).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    wav: PathBuf,
    /// Whitespace-separated phone transcript.
    #[arg(long)]
    phones: String,
    /// Signature file; `<stem>.align.csv`, `<stem>.boundaries.json` and `<stem>.run.json` go next to it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    finetune_steps: Option<usize>,
    /// Known alignment CSV to score the extracted boundaries against.
    #[arg(long)]
    reference_alignment: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CloneArgs {
    #[arg(long)]
    signature: PathBuf,
    /// Take the register from this recording.
    #[arg(long, conflicts_with_all = ["pitch_mean", "energy_mean"])]
    register_from: Option<PathBuf>,
    /// Target mean pitch in Hz (with --energy-mean).
    #[arg(long)]
    pitch_mean: Option<f64>,
    /// Target mean RMS energy (with --pitch-mean).
    #[arg(long)]
    energy_mean: Option<f64>,
    /// Output WAV.
    #[arg(long)]
    out: PathBuf,
    /// Resonance scale of the toy voice.
    #[arg(long, default_value_t = 1.0)]
    timbre_scale: f64,
    /// Corpus whose ground truth fits the baseline predictor that cloning overwrites.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Render the baseline prediction instead of the cloned prosody (needs --manifest).
    #[arg(long, requires = "manifest")]
    predictor_only: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Reference WAV or directory of WAVs.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Hypothesis WAV or directory with the same number of WAVs.
    #[arg(long)]
    hyp: PathBuf,
    /// Report JSON.
    #[arg(long)]
    out: PathBuf,
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Aligner used as phone recognizer for PER.
    #[arg(long, requires = "transcripts")]
    model: Option<PathBuf>,
    /// Corpus manifest giving the reference transcript of each reference file (by id = file stem).
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Corpus(a) => {
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            cfg.validate()?;
            let manifest = cmd_corpus(&mut cfg, a.n, &a.out, cli.force)?;
            println!("{}", manifest.display());
        }
        Command::TrainAlign(a) => {
            if let Some(e) = a.epochs {
                cfg.aligner.epochs = e;
            }
            if let Some(lr) = a.learning_rate {
                cfg.aligner.learning_rate = lr;
            }
            if let Some(seed) = a.seed {
                cfg.aligner.seed = seed;
            }
            cfg.validate()?;
            let report = cmd_train_align(&mut cfg, &a.manifest, &a.out, cli.force)?;
            println!(
                "{}: CTC loss {:.4} -> {:.4} over {} epochs",
                a.out.display(),
                report.initial_loss,
                report.final_loss(),
                report.epoch_losses.len()
            );
        }
        Command::Extract(a) => {
            if let Some(steps) = a.finetune_steps {
                cfg.finetune_steps = steps;
            }
            cfg.validate()?;
            let report = cmd_extract(
                &mut cfg,
                &a.model,
                &a.wav,
                &PhoneSequence::parse(&a.phones),
                &a.out,
                a.reference_alignment.as_deref(),
                cli.force,
            )?;
            print!(
                "{}: boundaries {:?}, CTC loss {:.4} -> {:.4} after {} finetune steps",
                a.out.display(),
                report.boundaries,
                report.loss_before,
                report.loss_after,
                report.finetune_steps
            );
            match report.reference_boundary_error {
                Some(err) => println!(", mean boundary error {err:.3} frames"),
                None => println!(),
            }
        }
        Command::CloneRender(a) => {
            if let Some(seed) = a.seed {
                cfg.seed = seed;
            }
            cfg.validate()?;
            let register = match (&a.register_from, a.pitch_mean, a.energy_mean) {
                (Some(_), _, _) => RegisterSource::Audio(a.register_from.clone().expect("checked")),
                (None, Some(p), Some(e)) => RegisterSource::Explicit(Register::new(p, e)?),
                _ => {
                    return Err(Error::invalid(
                        "a target register is required: --register-from WAV or --pitch-mean with --energy-mean",
                    ))
                }
            };
            let options = CloneOptions {
                timbre_scale: a.timbre_scale,
                manifest: a.manifest,
                predictor_only: a.predictor_only,
            };
            cmd_clone_render(
                &mut cfg,
                &a.signature,
                &register,
                &options,
                &a.out,
                cli.force,
            )?;
            println!("{}", a.out.display());
        }
        Command::Eval(a) => {
            cfg.validate()?;
            let report = cmd_eval(
                &mut cfg,
                &a.reference,
                &a.hyp,
                a.model.as_deref().zip(a.transcripts.as_deref()),
                &a.out,
                a.csv.as_deref(),
                cli.force,
            )?;
            println!("{}: {} pairs", a.out.display(), report.records.len());
        }
    }
    Ok(())
}

/// Writes `n` toy utterances into `out_dir`; returns the manifest path.
pub fn cmd_corpus(cfg: &mut RunConfig, n: usize, out_dir: &Path, force: bool) -> Result<PathBuf> {
    let manifest = out_dir.join("manifest.json");
    let record = out_dir.join("run.json");
    check_fresh(&[&manifest, &record], force)?;
    let mut corpus_cfg = ToyCorpusConfig::new(crate::synth::toy_inventory())?;
    corpus_cfg.frames = cfg.frames;
    corpus_cfg.sample_rate = cfg.sample_rate;
    let corpus = make_toy_corpus_with(&corpus_cfg, n, cfg.seed)?;
    let path = write_corpus(&corpus, &corpus_cfg, cfg.seed, out_dir)?;
    cfg.outputs.insert("manifest".into(), path.clone());
    write_json(
        &record,
        &RunRecord {
            version: RUN_CONFIG_FORMAT_VERSION,
            command: "corpus",
            config: cfg,
            summary: Some(serde_json::json!({ "utterances": n })),
        },
    )?;
    Ok(path)
}

fn manifest_dir(manifest: &Path) -> &Path {
    manifest.parent().unwrap_or_else(|| Path::new("."))
}

/// Trains an aligner on every utterance of `manifest` and saves it to `out`.
pub fn cmd_train_align(
    cfg: &mut RunConfig,
    manifest: &Path,
    out: &Path,
    force: bool,
) -> Result<TrainReport> {
    let record = sidecar(out, "run.json");
    check_fresh(&[out, &record], force)?;
    let m = CorpusManifest::load(manifest)?;
    let dir = manifest_dir(manifest);
    let features = cfg.aligner.features;
    let frames = cfg.frames;
    let samples = m
        .utterances
        .par_iter()
        .map(|u| {
            let audio = AudioBuffer::read_wav(dir.join(&u.wav))?;
            Ok(TrainingSample {
                features: features.extract(&audio, &frames)?,
                phones: u.phones.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (model, report) = train_aligner(&samples, &m.inventory, &cfg.aligner)?;
    model.save(out)?;
    cfg.inputs.insert("manifest".into(), manifest.to_path_buf());
    cfg.outputs.insert("model".into(), out.to_path_buf());
    write_json(
        &record,
        &RunRecord {
            version: RUN_CONFIG_FORMAT_VERSION,
            command: "train-align",
            config: cfg,
            summary: Some(serde_json::to_value(&report)?),
        },
    )?;
    Ok(report)
}

/// Boundary diagnostics written next to an extracted signature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub version: u32,
    pub finetune_steps: usize,
    pub loss_before: f64,
    pub loss_after: f64,
    pub boundaries: Vec<usize>,
    pub durations: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_boundary_error: Option<f64>,
}

pub fn cmd_extract(
    cfg: &mut RunConfig,
    model_path: &Path,
    wav: &Path,
    phones: &PhoneSequence,
    out: &Path,
    reference: Option<&Path>,
    force: bool,
) -> Result<BoundaryReport> {
    let align_csv = sidecar(out, "align.csv");
    let report_path = sidecar(out, "boundaries.json");
    let record = sidecar(out, "run.json");
    check_fresh(&[out, &align_csv, &report_path, &record], force)?;
    if phones.is_empty() {
        return Err(Error::invalid("transcript is empty"));
    }
    let model = AlignerModel::load(model_path)?;
    let audio = AudioBuffer::read_wav(wav)?;
    let reference = reference
        .map(|p| {
            let file = std::fs::File::open(p).map_err(|e| Error::io(p, e))?;
            Alignment::read_csv(file).map(|(_, a)| a)
        })
        .transpose()?;

    let features = model.features.extract(&audio, &cfg.frames)?;
    let target = model.inventory.encode(phones)?;
    let loss_before = model.loss(&features, &target)?;
    let tuned = finetune_aligner(&model, &features, phones, cfg.finetune_steps)?;
    let loss_after = tuned.loss(&features, &target)?;
    let ex = extract(&audio, phones, &tuned, &cfg.frames, &cfg.pitch, 0)?;

    let reference_boundary_error = reference
        .map(|r| ex.alignment.boundary_error(&r))
        .transpose()?;
    let report = BoundaryReport {
        version: 1,
        finetune_steps: cfg.finetune_steps,
        loss_before,
        loss_after,
        boundaries: ex.alignment.boundaries(),
        durations: ex.alignment.durations(),
        reference_boundary_error,
    };
    ex.signature.save(out)?;
    let file = std::fs::File::create(&align_csv).map_err(|e| Error::io(&align_csv, e))?;
    ex.alignment.write_csv(phones, file)?;
    write_json(&report_path, &report)?;
    cfg.inputs.insert("model".into(), model_path.to_path_buf());
    cfg.inputs.insert("wav".into(), wav.to_path_buf());
    cfg.outputs.insert("signature".into(), out.to_path_buf());
    cfg.outputs.insert("alignment".into(), align_csv);
    cfg.outputs.insert("boundary_report".into(), report_path);
    write_json(
        &record,
        &RunRecord {
            version: RUN_CONFIG_FORMAT_VERSION,
            command: "extract",
            config: cfg,
            summary: Some(serde_json::json!({ "phones": phones.to_string() })),
        },
    )?;
    Ok(report)
}

/// Where `clone-render` takes the target register from.
#[derive(Clone, Debug, PartialEq)]
pub enum RegisterSource {
    Audio(PathBuf),
    Explicit(Register),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CloneOptions {
    pub timbre_scale: f64,
    pub manifest: Option<PathBuf>,
    pub predictor_only: bool,
}

fn fit_baseline(manifest: &Path) -> Result<StatsBaselinePredictor> {
    let m = CorpusManifest::load(manifest)?;
    let dir = manifest_dir(manifest);
    let targets = m
        .utterances
        .iter()
        .map(|u| {
            let path = dir.join(&u.targets_json);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            Ok((
                u.phones.clone(),
                serde_json::from_str::<ProsodyTargets>(&text)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    StatsBaselinePredictor::fit(targets.iter().map(|(p, t)| (p, t)))
}

pub fn cmd_clone_render(
    cfg: &mut RunConfig,
    signature: &Path,
    register: &RegisterSource,
    options: &CloneOptions,
    out: &Path,
    force: bool,
) -> Result<PathBuf> {
    let record = sidecar(out, "run.json");
    check_fresh(&[out, &record], force)?;
    if !(options.timbre_scale > 0.0 && options.timbre_scale.is_finite()) {
        return Err(Error::invalid("timbre scale must be positive"));
    }
    let sig = ProsodySignature::load(signature)?;
    let register = match register {
        RegisterSource::Explicit(r) => {
            r.validate()?;
            *r
        }
        RegisterSource::Audio(path) => {
            cfg.inputs.insert("register_from".into(), path.clone());
            register_from_audio_with(&AudioBuffer::read_wav(path)?, &cfg.frames, &cfg.pitch)?
        }
    };
    let targets = match &options.manifest {
        Some(m) => {
            let baseline = fit_baseline(m)?;
            cfg.inputs.insert("manifest".into(), m.clone());
            if options.predictor_only {
                baseline.predict(&sig.phones, &register)?
            } else {
                clone_prosody(&baseline, &sig.phones, &sig, &register)?
            }
        }
        None => apply_signature(&sig, &register)?,
    };
    let timbres = PhoneTimbreTable::toy().scaled(options.timbre_scale);
    let audio = render(
        &targets,
        &sig.phones,
        &timbres,
        &cfg.frames,
        cfg.sample_rate,
        cfg.seed,
    )?;
    audio.write_wav(out)?;
    cfg.inputs
        .insert("signature".into(), signature.to_path_buf());
    cfg.outputs.insert("wav".into(), out.to_path_buf());
    write_json(
        &record,
        &RunRecord {
            version: RUN_CONFIG_FORMAT_VERSION,
            command: "clone-render",
            config: cfg,
            summary: Some(serde_json::json!({
                "register": register,
                "timbre_scale": options.timbre_scale,
                "predictor_only": options.predictor_only,
                "targets": targets,
            })),
        },
    )?;
    Ok(out.to_path_buf())
}

fn wav_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")));
    files.sort();
    Ok(files)
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Pairs files by sorted name; directories must hold the same number of WAVs.
fn eval_pairs(reference: &Path, hyp: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    match (reference.is_dir(), hyp.is_dir()) {
        (false, false) => Ok(vec![(
            stem(reference),
            reference.to_path_buf(),
            hyp.to_path_buf(),
        )]),
        (true, true) => {
            let (r, h) = (wav_files(reference)?, wav_files(hyp)?);
            if r.len() != h.len() {
                return Err(Error::invalid(format!(
                    "{} reference files but {} hypothesis files",
                    r.len(),
                    h.len()
                )));
            }
            if r.is_empty() {
                return Err(Error::invalid("no WAV files to evaluate"));
            }
            Ok(r.into_iter()
                .zip(h)
                .map(|(r, h)| {
                    let (rs, hs) = (stem(&r), stem(&h));
                    let id = if rs == hs { rs } else { format!("{rs}~{hs}") };
                    (id, r, h)
                })
                .collect())
        }
        _ => Err(Error::invalid(
            "--ref and --hyp must both be files or both be directories",
        )),
    }
}

pub fn cmd_eval(
    cfg: &mut RunConfig,
    reference: &Path,
    hyp: &Path,
    recognizer: Option<(&Path, &Path)>,
    out: &Path,
    csv_out: Option<&Path>,
    force: bool,
) -> Result<EvalReport> {
    let record = sidecar(out, "run.json");
    let mut outputs = vec![out, record.as_path()];
    outputs.extend(csv_out);
    check_fresh(&outputs, force)?;
    let pairs = eval_pairs(reference, hyp)?;
    let recognizer = recognizer
        .map(|(model, transcripts)| -> Result<_> {
            let m = CorpusManifest::load(transcripts)?;
            let phones: BTreeMap<String, PhoneSequence> =
                m.utterances.into_iter().map(|u| (u.id, u.phones)).collect();
            Ok((AlignerModel::load(model)?, phones))
        })
        .transpose()?;

    let frames = cfg.frames;
    let pitch = cfg.pitch;
    let n_mels = cfg.n_mels;
    let records = pairs
        .par_iter()
        .map(|(id, r, h)| -> Result<EvalRecord> {
            let (ra, ha) = (AudioBuffer::read_wav(r)?, AudioBuffer::read_wav(h)?);
            let mut rec = evaluate_audio(id, &ra, &ha, &frames, &pitch, n_mels)?;
            if let Some((model, transcripts)) = &recognizer {
                let reference = transcripts
                    .get(&stem(r))
                    .ok_or_else(|| Error::invalid(format!("no transcript for {}", stem(r))))?;
                let heard = recognize(model, &model.features.extract(&ha, &frames)?)?;
                rec.per = Some(per(reference, &heard)?);
            }
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = EvalReport::new(records);
    write_json(out, &report)?;
    if let Some(path) = csv_out {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        report.write_csv(file)?;
        cfg.outputs.insert("csv".into(), path.to_path_buf());
    }
    cfg.inputs.insert("ref".into(), reference.to_path_buf());
    cfg.inputs.insert("hyp".into(), hyp.to_path_buf());
    cfg.outputs.insert("report".into(), out.to_path_buf());
    write_json(
        &record,
        &RunRecord {
            version: RUN_CONFIG_FORMAT_VERSION,
            command: "eval",
            config: cfg,
            summary: None,
        },
    )?;
    Ok(report)
}
