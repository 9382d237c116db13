//! Reproducible experiment runner: corpus preparation, training, sweeps and
//! the modulation comparison, all writing into one output directory.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::codec::{soft_path_gradient_error, train_codec, CodecConfig, SemanticModel};
use crate::corpus::{load_corpus, split_corpus, synth, CorpusSplit, Sentence, Vocab};
use crate::error::{Error, Result};
use crate::fec::LdpcCode;
use crate::harq::{
    sweep, transmit_semantic, ConventionalSystem, HarqPolicy, Scheme, SchemeRunner, SemanticSystem, SweepTable,
};
use crate::huffman::{corpus_frequencies, HuffmanTable};
use crate::modulation::{
    mapper_gradient_error, train_codec_for_constellation, train_constellation, Constellation, ConstellationEpoch,
};
use crate::nn::Checkpoint;
use crate::phy::OfdmLink;
use crate::rng;
use crate::similarity::MetricKind;

pub use config::{
    file_checksum, ChannelSettings, CodecSettings, CodecTraining, ConstellationSettings, CorpusSettings,
    ExperimentConfig, ModexpSettings, RunManifest, SweepSettings, MANIFEST_FILE,
};

/// Artifact file names inside the output directory.
pub mod files {
    pub const CONFIG: &str = "config.json";
    pub const SYNTHETIC_CORPUS: &str = "corpus.txt";
    pub const TRAIN_SPLIT: &str = "train.txt";
    pub const TEST_SPLIT: &str = "test.txt";
    pub const VOCAB: &str = "vocab.tsv";
    pub const HUFFMAN: &str = "huffman.tsv";
    pub const CODEC: &str = "codec.json";
    pub const CODEC_LOSS: &str = "codec_loss.csv";
    pub const MOD_CODEC: &str = "codec320.json";
    pub const MOD_CODEC_LOSS: &str = "codec320_loss.csv";
    pub const MOD_CODEC_TRAINED: &str = "codec320_trained.json";
    pub const MOD_CODEC_QAM: &str = "codec320_qam.json";
    pub const CONSTELLATION: &str = "constellation.json";
    pub const CONSTELLATION_LOSS: &str = "constellation_loss.csv";
    pub const SWEEP: &str = "sweep.csv";
    pub const MODEXP: &str = "modexp.csv";
    pub const SCATTER: &str = "scatter.json";
}

pub const MODEXP_HEADER: &str = "snr_db,modulation,metric_name,mean_similarity,std_error,n,seed";

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs `body` as a named stage and records its artifacts and timing.
fn stage<T>(
    cfg: &ExperimentConfig,
    name: &str,
    body: impl FnOnce(&Path) -> Result<(T, Vec<&'static str>)>,
) -> Result<T> {
    let dir = cfg.out.as_path();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let start = Instant::now();
    let (value, produced) = body(dir)?;
    let mut manifest = RunManifest::load_or_new(dir)?;
    manifest.record(dir, &produced)?;
    manifest.stages.insert(name.into(), start.elapsed().as_secs_f64());
    if name == "sweep" {
        manifest.notes.insert(
            "acceptance_oracle".into(),
            "genie: semantic acceptance compares with the transmitted sentence".into(),
        );
    }
    manifest.save(dir, cfg)?;
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepareSummary {
    pub retained: usize,
    pub dropped: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub vocab_size: usize,
}

fn corpus_path(cfg: &ExperimentConfig) -> PathBuf {
    cfg.corpus
        .path
        .clone()
        .unwrap_or_else(|| cfg.out.join(files::SYNTHETIC_CORPUS))
}

/// Loads (and, for the synthetic corpus, writes) sentences; splits them and
/// writes split manifests, vocabulary and Huffman table.
pub fn cmd_prepare(cfg: &ExperimentConfig) -> Result<PrepareSummary> {
    cfg.validate()?;
    stage(cfg, "prepare", |dir| {
        let mut produced = vec![
            files::CONFIG,
            files::TRAIN_SPLIT,
            files::TEST_SPLIT,
            files::VOCAB,
            files::HUFFMAN,
        ];
        if cfg.corpus.path.is_none() {
            synth::write_corpus(
                dir.join(files::SYNTHETIC_CORPUS),
                cfg.corpus.synthetic_lines,
                cfg.stage_seed("synthetic-corpus"),
            )?;
            produced.push(files::SYNTHETIC_CORPUS);
        }
        let loaded = load_corpus(corpus_path(cfg), cfg.corpus.min_words, cfg.corpus.max_words)?;
        let split = split_corpus(
            &loaded.sentences,
            cfg.corpus.n_train,
            cfg.corpus.n_test,
            cfg.stage_seed("split"),
        )?;
        let vocab = Vocab::build(&split.train, cfg.corpus.vocab_size)?;
        let texts: Vec<String> = split.train.iter().map(Sentence::text).collect();
        let huffman = HuffmanTable::build(&corpus_frequencies(&texts))?;
        write(dir, files::CONFIG, &cfg.to_json()?)?;
        write(dir, files::TRAIN_SPLIT, &CorpusSplit::manifest(&split.train))?;
        write(dir, files::TEST_SPLIT, &CorpusSplit::manifest(&split.test))?;
        write(dir, files::VOCAB, &vocab.to_text())?;
        write(dir, files::HUFFMAN, &huffman.to_text())?;
        let summary = PrepareSummary {
            retained: loaded.sentences.len(),
            dropped: loaded.dropped,
            n_train: split.train.len(),
            n_test: split.test.len(),
            vocab_size: vocab.len(),
        };
        Ok((summary, produced))
    })
}

/// Artifacts written by [`cmd_prepare`].
#[derive(Clone, Debug)]
pub struct Prepared {
    pub train: Vec<Sentence>,
    pub test: Vec<Sentence>,
    pub vocab: Vocab,
    pub huffman: HuffmanTable,
}

pub fn load_prepared(cfg: &ExperimentConfig) -> Result<Prepared> {
    let dir = cfg.out.as_path();
    let loaded = load_corpus(corpus_path(cfg), cfg.corpus.min_words, cfg.corpus.max_words)?;
    Ok(Prepared {
        train: CorpusSplit::from_manifest(&read(dir, files::TRAIN_SPLIT)?, &loaded.sentences)?,
        test: CorpusSplit::from_manifest(&read(dir, files::TEST_SPLIT)?, &loaded.sentences)?,
        vocab: Vocab::from_text(&read(dir, files::VOCAB)?)?,
        huffman: HuffmanTable::from_text(&read(dir, files::HUFFMAN)?)?,
    })
}

/// Loads a codec checkpoint, naming the artifact when it is missing.
pub fn load_codec(dir: &Path, name: &str) -> Result<SemanticModel> {
    let path = dir.join(name);
    if !path.is_file() {
        return Err(Error::InvalidArgument(format!(
            "missing artifact {}; run the train command first",
            path.display()
        )));
    }
    SemanticModel::from_checkpoint(&Checkpoint::load(&path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainTarget {
    Codec,
    Constellation,
}

fn codec_loss_csv(log: &[crate::codec::EpochLog]) -> String {
    let mut s = String::from("epoch,train_loss,validation_loss\n");
    for e in log {
        let _ = writeln!(s, "{},{},{}", e.epoch, num(e.train_loss), num(e.validation_loss));
    }
    s
}

/// Trains the HARQ codec, or the modulation-experiment codec together with
/// the learned constellation and a QAM-matched reference codec.
pub fn cmd_train(cfg: &ExperimentConfig, target: TrainTarget) -> Result<()> {
    cfg.validate()?;
    let prepared = load_prepared(cfg)?;
    match target {
        TrainTarget::Codec => stage(cfg, "train_codec", |dir| {
            let tc = cfg.codec.training.with_seed(cfg.stage_seed("codec"));
            let config = cfg.codec.codec_config(prepared.vocab.len());
            let (model, log) = train_codec(&prepared.train, &prepared.vocab, config, &tc)?;
            model.to_checkpoint()?.save(dir.join(files::CODEC))?;
            write(dir, files::CODEC_LOSS, &codec_loss_csv(&log))?;
            Ok(((), vec![files::CODEC, files::CODEC_LOSS]))
        }),
        TrainTarget::Constellation => {
            let mapper_seconds = stage(cfg, "train_constellation", |dir| {
                let s = &cfg.constellation;
                let tc = s.codec.training.with_seed(cfg.stage_seed("codec320"));
                let config = s.codec.codec_config(prepared.vocab.len());
                let (base, log) = train_codec(&prepared.train, &prepared.vocab, config, &tc)?;
                base.to_checkpoint()?.save(dir.join(files::MOD_CODEC))?;
                write(dir, files::MOD_CODEC_LOSS, &codec_loss_csv(&log))?;
                let n = if s.train_sentences == 0 {
                    prepared.train.len()
                } else {
                    s.train_sentences.min(prepared.train.len())
                };
                let train = &prepared.train[..n];
                let ct = s.with_seed(cfg.stage_seed("constellation"));
                let start = Instant::now();
                let trained = train_constellation(base.clone(), train, &prepared.vocab, &ct)?;
                let mapper_seconds = start.elapsed().as_secs_f64();
                let qam = train_codec_for_constellation(base, &Constellation::qam16(), train, &prepared.vocab, &ct)?;
                trained.constellation.save(dir.join(files::CONSTELLATION))?;
                trained
                    .codec
                    .to_checkpoint()?
                    .save(dir.join(files::MOD_CODEC_TRAINED))?;
                qam.codec.to_checkpoint()?.save(dir.join(files::MOD_CODEC_QAM))?;
                let mut csv = String::from("arm,epoch,train_loss,eval_loss\n");
                for (arm, log) in [("trained", &trained.log), ("qam16", &qam.log)] {
                    for e in log.iter() {
                        let ConstellationEpoch {
                            epoch,
                            train_loss,
                            eval_loss,
                        } = e;
                        let _ = writeln!(csv, "{arm},{epoch},{},{}", num(*train_loss), num(*eval_loss));
                    }
                }
                write(dir, files::CONSTELLATION_LOSS, &csv)?;
                Ok((
                    mapper_seconds,
                    vec![
                        files::MOD_CODEC,
                        files::MOD_CODEC_LOSS,
                        files::CONSTELLATION,
                        files::MOD_CODEC_TRAINED,
                        files::MOD_CODEC_QAM,
                        files::CONSTELLATION_LOSS,
                    ],
                ))
            })?;
            let mut manifest = RunManifest::load_or_new(&cfg.out)?;
            manifest.stages.insert("constellation_mapper".into(), mapper_seconds);
            manifest.save(&cfg.out, cfg)
        }
    }
}

fn link(cfg: &ExperimentConfig) -> Result<OfdmLink> {
    OfdmLink::new(cfg.channel.ofdm.clone(), cfg.channel.model, cfg.channel.csi)
}

/// Runs the HARQ sweep over the configured schemes and SNR points.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let prepared = load_prepared(cfg)?;
    let policies: Vec<HarqPolicy> = cfg
        .sweep
        .schemes
        .iter()
        .map(|s| HarqPolicy::from_name(s))
        .collect::<Result<_>>()?;
    let need_semantic = policies.iter().any(|p| p.scheme == Scheme::Scharq);
    let need_conventional = policies.iter().any(|p| p.scheme == Scheme::Conventional);
    stage(cfg, "sweep", |dir| {
        let semantic = if need_semantic {
            let model = load_codec(dir, files::CODEC)?;
            Some(SemanticSystem::new(model, prepared.vocab.clone(), link(cfg)?))
        } else {
            None
        };
        let conventional = if need_conventional {
            let code = LdpcCode::construct(cfg.channel.ldpc_seed)?;
            let mut sys = ConventionalSystem::new(prepared.huffman.clone(), code, link(cfg)?)?;
            sys.max_iters = cfg.channel.bp_iterations;
            Some(sys)
        } else {
            None
        };
        let runners: Vec<SchemeRunner> = policies
            .iter()
            .map(|p| match p.scheme {
                Scheme::Conventional => SchemeRunner::Conventional(conventional.as_ref().unwrap(), p),
                Scheme::Scharq => SchemeRunner::Scharq(semantic.as_ref().unwrap(), p),
            })
            .collect();
        let n = cfg.sweep.sentences.min(prepared.test.len());
        let table = sweep(
            &runners,
            &cfg.sweep.snr_db,
            &prepared.test[..n],
            cfg.stage_seed("sweep"),
            cfg.workers,
        )?;
        write(dir, files::SWEEP, &table.to_csv())?;
        Ok((table, vec![files::SWEEP]))
    })
}

/// Per-sentence similarities of both modulation arms at one SNR, under
/// identical channel randomness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModexpPoint {
    pub snr_db: f64,
    pub qam16: Vec<f64>,
    pub trained: Vec<f64>,
}

fn mean_and_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (0.0, 0.0);
    }
    let m = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (m, 0.0);
    }
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Compares the QAM arm and the learned-constellation arm over the test split.
pub fn cmd_modexp(cfg: &ExperimentConfig) -> Result<Vec<ModexpPoint>> {
    cfg.validate()?;
    let prepared = load_prepared(cfg)?;
    stage(cfg, "modexp", |dir| {
        let mut arms = Vec::new();
        for (name, constellation) in [
            (files::MOD_CODEC_QAM, Constellation::qam16()),
            (
                files::MOD_CODEC_TRAINED,
                Constellation::load(dir.join(files::CONSTELLATION))?,
            ),
        ] {
            let model = load_codec(dir, name)?;
            if model.config.code_bits != 320 || model.config.blocks != 1 {
                return Err(Error::InvalidArgument(format!(
                    "{name} has {} bits in {} blocks; the modulation experiment needs 320 bits in one block",
                    model.config.code_bits, model.config.blocks
                )));
            }
            let mut sys = SemanticSystem::new(model, prepared.vocab.clone(), link(cfg)?);
            sys.constellation = constellation;
            arms.push(sys);
        }
        let n = cfg.modexp.sentences.min(prepared.test.len());
        let sentences = &prepared.test[..n];
        let base = cfg.stage_seed("modexp");
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
        let mut points = Vec::new();
        for &snr in &cfg.modexp.snr_db {
            let mut scores = Vec::new();
            for sys in &arms {
                use rayon::prelude::*;
                let s: Vec<f64> = pool.install(|| {
                    sentences
                        .par_iter()
                        .enumerate()
                        .map(|(i, s)| {
                            let seed = rng::derive_seed(base, &[snr.to_bits(), i as u64]);
                            Ok(transmit_semantic(s, snr, sys, &mut rng::stream(seed))?.1)
                        })
                        .collect::<Result<_>>()
                })?;
                scores.push(s);
            }
            let trained = scores.pop().unwrap_or_default();
            let qam16 = scores.pop().unwrap_or_default();
            points.push(ModexpPoint {
                snr_db: snr,
                qam16,
                trained,
            });
        }
        let mut csv = format!("{MODEXP_HEADER}\n");
        for p in &points {
            for (arm, v) in [("qam16", &p.qam16), ("trained", &p.trained)] {
                let (m, se) = mean_and_stderr(v);
                let _ = writeln!(
                    csv,
                    "{},{arm},{},{},{},{},{base}",
                    num(p.snr_db),
                    MetricKind::WordEdit.name(),
                    num(m),
                    num(se),
                    v.len()
                );
            }
        }
        write(dir, files::MODEXP, &csv)?;
        let constellation = Constellation::load(dir.join(files::CONSTELLATION))?;
        constellation.save(dir.join(files::SCATTER))?;
        Ok((points, vec![files::MODEXP, files::SCATTER]))
    })
}

/// Result of [`cmd_gradcheck`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub checks: Vec<(String, f64)>,
    pub max_error: f64,
}

pub const GRADCHECK_TOLERANCE: f64 = 1e-4;

/// Central-difference gradient checks on the codec soft path and on the
/// end-to-end constellation path, for a reduced-width model of the
/// configured architecture.
pub fn cmd_gradcheck(cfg: &ExperimentConfig) -> Result<GradcheckReport> {
    cfg.validate()?;
    let reduced = CodecConfig {
        max_len: 6,
        embed_dim: 4,
        hidden: 10,
        code_bits: 12,
        blocks: 3,
        vocab_size: 9,
    };
    let single = CodecConfig {
        code_bits: 8,
        blocks: 1,
        ..reduced.clone()
    };
    let checks = vec![
        (
            "codec_soft_path".to_string(),
            soft_path_gradient_error(reduced, cfg.seed)?,
        ),
        (
            "constellation_mapper".to_string(),
            mapper_gradient_error(single, cfg.seed)?,
        ),
    ];
    let max_error = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(GradcheckReport { checks, max_error })
}
