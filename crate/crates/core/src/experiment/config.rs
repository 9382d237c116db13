//! Experiment configuration and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::{CodecConfig, TrainConfig};
use crate::corpus::{MAX_WORDS, MIN_WORDS};
use crate::error::{Error, Result};
use crate::harq::HarqPolicy;
use crate::modulation::{ConstellationTraining, MapperInit};
use crate::phy::{ChannelModel, CsiMode, OfdmConfig};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSettings {
    /// One sentence per line; a synthetic corpus is generated when absent.
    pub path: Option<PathBuf>,
    pub synthetic_lines: usize,
    pub min_words: usize,
    pub max_words: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub vocab_size: usize,
}

impl Default for CorpusSettings {
    fn default() -> Self {
        CorpusSettings {
            path: None,
            synthetic_lines: 125_000,
            min_words: MIN_WORDS,
            max_words: MAX_WORDS,
            n_train: 100_000,
            n_test: 10_000,
            vocab_size: 20_000,
        }
    }
}

/// Optimizer settings shared by the codec trainers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecTraining {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub flip_range: (f64, f64),
    pub keep_prob: f64,
    pub validation_fraction: f64,
}

impl Default for CodecTraining {
    fn default() -> Self {
        let t = TrainConfig::default();
        CodecTraining {
            epochs: 30,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            flip_range: t.flip_range,
            keep_prob: t.keep_prob,
            validation_fraction: t.validation_fraction,
        }
    }
}

impl CodecTraining {
    pub fn with_seed(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            flip_range: self.flip_range,
            keep_prob: self.keep_prob,
            validation_fraction: self.validation_fraction,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecSettings {
    pub max_len: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    pub code_bits: usize,
    pub blocks: usize,
    pub training: CodecTraining,
}

impl Default for CodecSettings {
    fn default() -> Self {
        let c = CodecConfig::harq(0);
        CodecSettings {
            max_len: c.max_len,
            embed_dim: c.embed_dim,
            hidden: c.hidden,
            code_bits: c.code_bits,
            blocks: c.blocks,
            // flips up to 25% cover the post-equalization bit error rate of
            // the 16-QAM fading link at 0-4 dB
            training: CodecTraining {
                flip_range: (0.0, 0.25),
                ..CodecTraining::default()
            },
        }
    }
}

impl CodecSettings {
    pub fn codec_config(&self, vocab_size: usize) -> CodecConfig {
        CodecConfig {
            max_len: self.max_len,
            embed_dim: self.embed_dim,
            hidden: self.hidden,
            code_bits: self.code_bits,
            blocks: self.blocks,
            vocab_size,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationSettings {
    /// Single-block codec for the modulation experiment.
    pub codec: CodecSettings,
    pub snr_train_db: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub mapper_learning_rate: f64,
    pub codec_learning_rate: f64,
    pub joint: bool,
    pub eval_size: usize,
    pub init: MapperInit,
    /// Training sentences used by the end-to-end loop (0 = all).
    pub train_sentences: usize,
}

impl Default for ConstellationSettings {
    fn default() -> Self {
        let t = ConstellationTraining::default();
        ConstellationSettings {
            codec: CodecSettings {
                code_bits: 320,
                blocks: 1,
                training: CodecTraining::default(),
                ..CodecSettings::default()
            },
            snr_train_db: t.snr_train_db,
            epochs: t.epochs,
            batch_size: t.batch_size,
            mapper_learning_rate: t.mapper_learning_rate,
            codec_learning_rate: t.codec_learning_rate,
            joint: t.joint,
            eval_size: t.eval_size,
            init: t.init,
            train_sentences: 0,
        }
    }
}

impl ConstellationSettings {
    pub fn with_seed(&self, seed: u64) -> ConstellationTraining {
        ConstellationTraining {
            snr_train_db: self.snr_train_db,
            epochs: self.epochs,
            batch_size: self.batch_size,
            mapper_learning_rate: self.mapper_learning_rate,
            codec_learning_rate: self.codec_learning_rate,
            joint: self.joint,
            eval_size: self.eval_size,
            init: self.init,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSettings {
    pub ofdm: OfdmConfig,
    pub model: ChannelModel,
    pub csi: CsiMode,
    pub ldpc_seed: u64,
    pub bp_iterations: usize,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        ChannelSettings {
            ofdm: OfdmConfig::default(),
            model: ChannelModel::default(),
            csi: CsiMode::default(),
            ldpc_seed: 1,
            bp_iterations: crate::fec::DEFAULT_MAX_ITERS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub schemes: Vec<String>,
    pub snr_db: Vec<f64>,
    /// Test sentences per point (capped by the test split).
    pub sentences: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            schemes: vec!["conventional".into(), "scharq-exact".into(), "scharq-sim0.98".into()],
            snr_db: vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0],
            sentences: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModexpSettings {
    pub snr_db: Vec<f64>,
    pub sentences: usize,
}

impl Default for ModexpSettings {
    fn default() -> Self {
        ModexpSettings {
            snr_db: vec![4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 18.0],
            sentences: 2000,
        }
    }
}

/// Everything that influences results. Seeds of individual stages derive
/// from `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub corpus: CorpusSettings,
    pub codec: CodecSettings,
    pub constellation: ConstellationSettings,
    pub channel: ChannelSettings,
    pub sweep: SweepSettings,
    pub modexp: ModexpSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            out: PathBuf::from("out"),
            workers: 1,
            corpus: CorpusSettings::default(),
            codec: CodecSettings::default(),
            constellation: ConstellationSettings::default(),
            channel: ChannelSettings::default(),
            sweep: SweepSettings::default(),
            modexp: ModexpSettings::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses `text` as a patch over the defaults: nested objects are merged
    /// key by key, so a partial section keeps the defaults of its context.
    pub fn from_json(text: &str) -> Result<Self> {
        let patch: serde_json::Value = serde_json::from_str(text)?;
        if !patch.is_object() {
            return Err(Error::InvalidArgument("configuration must be a JSON object".into()));
        }
        let mut merged = serde_json::to_value(ExperimentConfig::default())?;
        merge(&mut merged, patch);
        Ok(serde_json::from_value(merged)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with every field, defaults included.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn stage_seed(&self, stage: &str) -> u64 {
        rng::derive_seed(self.seed, &[rng::tag(stage)])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if let Some(p) = &self.corpus.path {
            if !p.is_file() {
                return bad(format!("corpus file {} does not exist", p.display()));
            }
        }
        let c = &self.corpus;
        if c.min_words == 0 || c.min_words > c.max_words || c.n_train == 0 || c.n_test == 0 {
            return bad("corpus length limits and split sizes must be positive and ordered".into());
        }
        if self.sweep.snr_db.is_empty() || self.modexp.snr_db.is_empty() {
            return bad("SNR lists must not be empty".into());
        }
        if self.sweep.schemes.is_empty() {
            return bad("scheme list must not be empty".into());
        }
        for s in &self.sweep.schemes {
            HarqPolicy::from_name(s)?;
        }
        if self.sweep.snr_db.iter().chain(&self.modexp.snr_db).any(|s| s.is_nan()) {
            return bad("SNR values must be numbers".into());
        }
        self.codec.codec_config(4).validate()?;
        self.constellation.codec.codec_config(4).validate()?;
        if self.workers == 0 {
            return bad("at least one worker is required".into());
        }
        Ok(())
    }
}

/// Hex SHA-256 of a file.
pub fn file_checksum(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn merge(base: &mut serde_json::Value, patch: serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Accumulated record of what was run and produced in an output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: Option<ExperimentConfig>,
    /// Artifact file name → SHA-256.
    pub artifacts: BTreeMap<String, String>,
    /// Stage name → wall-clock seconds.
    pub stages: BTreeMap<String, f64>,
    /// Notes stamped by stages, e.g. the acceptance oracle used.
    pub notes: BTreeMap<String, String>,
}

pub const MANIFEST_FILE: &str = "run_manifest.json";

impl RunManifest {
    pub fn load_or_new(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(RunManifest::default());
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn record(&mut self, dir: &Path, files: &[&str]) -> Result<()> {
        for f in files {
            self.artifacts.insert(f.to_string(), file_checksum(dir.join(f))?);
        }
        Ok(())
    }

    pub fn save(&mut self, dir: &Path, config: &ExperimentConfig) -> Result<()> {
        self.tool_version = env!("CARGO_PKG_VERSION").into();
        self.config = Some(config.clone());
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_sections_merge_onto_their_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"codec": {"training": {"epochs": 2}}, "constellation": {"codec": {"training": {"epochs": 1}}},
                "channel": {"model": {"multipath": {"taps": 4}}}}"#,
        )
        .unwrap();
        let d = ExperimentConfig::default();
        assert_eq!(c.codec.training.epochs, 2);
        assert_eq!(c.codec.training.flip_range, d.codec.training.flip_range);
        assert_eq!(
            (c.constellation.codec.code_bits, c.constellation.codec.blocks),
            (320, 1)
        );
        assert_eq!(c.constellation.codec.training.epochs, 1);
        assert_eq!(c.channel.model, ChannelModel::Multipath { taps: 4, decay_db: 3.0 });
        let awgn = ExperimentConfig::from_json(r#"{"channel": {"model": "awgn"}}"#).unwrap();
        assert_eq!(awgn.channel.model, ChannelModel::Awgn);
        assert!(ExperimentConfig::from_json(r#"{"codec": {"trainin": {}}}"#).is_err());
        assert!(ExperimentConfig::from_json("[1]").is_err());
    }

    #[test]
    fn defaults_are_echoed_and_reparsed() {
        let c = ExperimentConfig::default();
        let text = c.to_json().unwrap();
        assert!(text.contains("\"n_train\": 100000"));
        assert!(text.contains("\"code_bits\": 320"));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        c.validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = ExperimentConfig::from_json(r#"{"seed": 9, "sweep": {"snr_db": [0, 4]}}"#).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.sweep.snr_db, vec![0.0, 4.0]);
        assert_eq!(c.sweep.sentences, 2000);
        assert_eq!(c.corpus, CorpusSettings::default());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"sede": 9}"#).is_err());
        let mut c = ExperimentConfig::default();
        c.sweep.snr_db.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.sweep.schemes = vec!["turbo".into()];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.corpus.path = Some("/nonexistent/corpus.txt".into());
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.codec.code_bits = 1200;
        assert!(c.validate().is_err());
    }

    #[test]
    fn checksum_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("abc");
        fs::write(&p, "abc").unwrap();
        assert_eq!(
            file_checksum(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
