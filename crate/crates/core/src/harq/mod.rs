//! HARQ sessions: conventional incremental redundancy over Huffman + LDPC,
//! and semantic HARQ sending extra codec blocks until the sentence is accepted.

mod sweep;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::codec::{CodewordBlock, SemanticModel};
use crate::corpus::{tokenize, Sentence, Vocab};
use crate::error::{Error, Result};
use crate::fec::{
    assemble_llrs, crc_append, crc_check, decode_bp, select_bits, LdpcCode, PunctureSchedule, DEFAULT_MAX_ITERS,
};
use crate::huffman::HuffmanTable;
use crate::modulation::{demod_hard, demod_soft, modulate, Constellation};
use crate::phy::OfdmLink;
use crate::rng::Stream;
use crate::similarity::{accept, sim_edit};

pub use sweep::{run_sessions, sweep, wilson_interval, SchemeRunner, SweepRow, SweepTable, CSV_HEADER};

/// Floor on the equalizer noise variance so a noiseless link still yields
/// finite LLRs.
const MIN_NOISE_VAR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Conventional,
    Scharq,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    Crc,
    ExactMatch,
    /// Strictly above the threshold under word-edit similarity.
    Similarity(f64),
}

impl Acceptance {
    pub fn label(&self) -> String {
        match self {
            Acceptance::Crc => "crc".into(),
            Acceptance::ExactMatch => "exact".into(),
            Acceptance::Similarity(t) => format!("sim>{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarqPolicy {
    pub scheme: Scheme,
    pub max_rounds: usize,
    pub acceptance: Acceptance,
    /// Semantic blocks sent in the first round.
    pub initial_blocks: usize,
}

impl HarqPolicy {
    pub fn conventional() -> Self {
        HarqPolicy {
            scheme: Scheme::Conventional,
            max_rounds: 3,
            acceptance: Acceptance::Crc,
            initial_blocks: 0,
        }
    }

    pub fn scharq_exact() -> Self {
        HarqPolicy {
            scheme: Scheme::Scharq,
            max_rounds: 5,
            acceptance: Acceptance::ExactMatch,
            initial_blocks: 2,
        }
    }

    pub fn scharq_similarity(threshold: f64) -> Self {
        HarqPolicy {
            acceptance: Acceptance::Similarity(threshold),
            ..Self::scharq_exact()
        }
    }

    /// Scheme name used in result tables: `conventional`, `scharq-exact`,
    /// `scharq-sim0.98`.
    pub fn name(&self) -> String {
        match (self.scheme, self.acceptance) {
            (Scheme::Conventional, _) => "conventional".into(),
            (Scheme::Scharq, Acceptance::Similarity(t)) => format!("scharq-sim{t}"),
            (Scheme::Scharq, _) => "scharq-exact".into(),
        }
    }

    /// Parses a scheme name as produced by [`HarqPolicy::name`].
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "conventional" => Ok(Self::conventional()),
            "scharq-exact" => Ok(Self::scharq_exact()),
            _ => {
                let t = name
                    .strip_prefix("scharq-sim")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme '{name}'")))?;
                let p = Self::scharq_similarity(t);
                p.validate()?;
                Ok(p)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.max_rounds == 0 {
            return bad("at least one round is required");
        }
        if let Acceptance::Similarity(t) = self.acceptance {
            if !(0.0..=1.0).contains(&t) {
                return bad("similarity threshold outside [0, 1]");
            }
        }
        match (self.scheme, self.acceptance) {
            (Scheme::Conventional, Acceptance::Crc) => Ok(()),
            (Scheme::Scharq, Acceptance::Crc) | (Scheme::Conventional, _) => {
                bad("conventional HARQ is CRC-gated and semantic HARQ is not")
            }
            (Scheme::Scharq, _) if self.initial_blocks == 0 => bad("semantic HARQ needs initial blocks"),
            _ => Ok(()),
        }
    }
}

/// What happened in one round of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    /// Payload bits scheduled and sent this round.
    pub bits: usize,
    /// Constellation symbols put on the air (including padding).
    pub symbols: usize,
    pub frames: usize,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub scheme: String,
    pub success: bool,
    pub rounds: usize,
    pub bits_sent: usize,
    /// Word-edit similarity of the final decoded sentence to the original.
    pub similarity: f64,
    pub decoded: Vec<String>,
    pub trace: Vec<RoundTrace>,
}

/// Sends `bits` over the link with `constellation`; returns per-bit LLRs
/// (without padding) and the trace counters.
fn send_soft(
    bits: &BitVector,
    constellation: &Constellation,
    link: &OfdmLink,
    snr_db: f64,
    rng: &mut Stream,
) -> Result<(Vec<f64>, usize, usize)> {
    let m = modulate(bits, constellation);
    let out = link.transmit(&m.symbols, constellation.points(), snr_db, rng)?;
    let z: Vec<Complex64> = out.equalized.iter().map(|e| e.symbol).collect();
    let g: Vec<f64> = out.equalized.iter().map(|e| e.gain).collect();
    let nv: Vec<f64> = out.equalized.iter().map(|e| e.noise_var.max(MIN_NOISE_VAR)).collect();
    let mut llrs = demod_soft(&z, &g, &nv, constellation)?;
    llrs.truncate(bits.len());
    Ok((llrs, m.symbols.len(), out.frames))
}

fn send_hard(
    bits: &BitVector,
    constellation: &Constellation,
    link: &OfdmLink,
    snr_db: f64,
    rng: &mut Stream,
) -> Result<(BitVector, usize, usize)> {
    let m = modulate(bits, constellation);
    let out = link.transmit(&m.symbols, constellation.points(), snr_db, rng)?;
    let z: Vec<Complex64> = out.equalized.iter().map(|e| e.symbol).collect();
    let g: Vec<f64> = out.equalized.iter().map(|e| e.gain).collect();
    let mut rx = demod_hard(&z, &g, constellation);
    rx.truncate(bits.len());
    Ok((rx, m.symbols.len(), out.frames))
}

/// Huffman source coding, CRC-protected LDPC blocks, 16-QAM over OFDM.
#[derive(Clone, Debug)]
pub struct ConventionalSystem {
    pub huffman: HuffmanTable,
    pub code: LdpcCode,
    pub schedule: PunctureSchedule,
    pub link: OfdmLink,
    pub constellation: Constellation,
    pub max_iters: usize,
}

impl ConventionalSystem {
    pub fn new(huffman: HuffmanTable, code: LdpcCode, link: OfdmLink) -> Result<Self> {
        let schedule = PunctureSchedule::default_for(&code)?;
        Ok(ConventionalSystem {
            huffman,
            code,
            schedule,
            link,
            constellation: Constellation::qam16(),
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    /// Splits a payload into the fewest CRC blocks, sizes differing by at most one bit.
    pub fn segment(&self, payload: &BitVector) -> Result<Vec<BitVector>> {
        let cap = self.code.k() - crate::fec::CRC_WIDTH;
        let n = payload.len().div_ceil(cap).max(1);
        let (base, extra) = (payload.len() / n, payload.len() % n);
        let mut out = Vec::with_capacity(n);
        let mut start = 0;
        for i in 0..n {
            let len = base + usize::from(i < extra);
            out.push(payload.slice(start, start + len)?);
            start += len;
        }
        Ok(out)
    }
}

struct Segment {
    info_len: usize,
    codeword: BitVector,
    shortened: Vec<usize>,
    received: Vec<(usize, Vec<f64>)>,
    decoded: Option<BitVector>,
    passed: bool,
}

/// One conventional IR-HARQ session. Every round sends the next schedule
/// increment of every CRC block; the session is acknowledged once all blocks
/// pass their CRC.
pub fn run_conventional(
    sentence: &Sentence,
    snr_db: f64,
    policy: &HarqPolicy,
    system: &ConventionalSystem,
    rng: &mut Stream,
) -> Result<SessionResult> {
    policy.validate()?;
    if policy.scheme != Scheme::Conventional {
        return Err(Error::InvalidArgument("policy is not conventional".into()));
    }
    let rounds = policy.max_rounds.min(system.schedule.rounds());
    let payload = system.huffman.encode(&sentence.text())?;
    let mut segments = Vec::new();
    for part in system.segment(&payload)? {
        let info = crc_append(&part);
        segments.push(Segment {
            info_len: info.len(),
            codeword: system.code.encode(&info)?,
            shortened: system.code.shortened(info.len()),
            received: Vec::new(),
            decoded: None,
            passed: false,
        });
    }
    let mut trace = Vec::with_capacity(rounds);
    let mut bits_sent = 0;
    for round in 1..=rounds {
        let mut bits = BitVector::new();
        let mut lens = Vec::with_capacity(segments.len());
        for seg in &segments {
            let sel = select_bits(&seg.codeword, &system.schedule, round, &seg.shortened)?;
            lens.push(sel.bits.len());
            bits.extend_from(&sel.bits);
        }
        let (llrs, symbols, frames) = send_soft(&bits, &system.constellation, &system.link, snr_db, rng)?;
        let mut off = 0;
        for (seg, len) in segments.iter_mut().zip(lens) {
            seg.received.push((round, llrs[off..off + len].to_vec()));
            off += len;
        }
        for seg in segments.iter_mut().filter(|s| !s.passed) {
            let l = assemble_llrs(&seg.received, &system.code, &system.schedule, &seg.shortened)?;
            let out = decode_bp(&l, &system.code, system.max_iters)?;
            let info = out.info.slice(0, seg.info_len)?;
            seg.passed = crc_check(&info);
            seg.decoded = Some(info);
        }
        bits_sent += bits.len();
        let accepted = segments.iter().all(|s| s.passed);
        trace.push(RoundTrace {
            round,
            bits: bits.len(),
            symbols,
            frames,
            accepted,
        });
        if accepted {
            break;
        }
    }
    let mut received = BitVector::new();
    for seg in &segments {
        if let Some(d) = &seg.decoded {
            received.extend_from(&d.slice(0, seg.info_len - crate::fec::CRC_WIDTH)?);
        }
    }
    let decoded = tokenize(&system.huffman.decode(&received).text);
    let success = segments.iter().all(|s| s.passed);
    Ok(SessionResult {
        scheme: policy.name(),
        success,
        rounds: trace.len(),
        bits_sent,
        similarity: sim_edit(&decoded, &sentence.tokens),
        decoded,
        trace,
    })
}

/// Semantic codec with 16-point modulation over OFDM.
#[derive(Clone, Debug)]
pub struct SemanticSystem {
    pub model: SemanticModel,
    pub vocab: Vocab,
    pub link: OfdmLink,
    pub constellation: Constellation,
}

impl SemanticSystem {
    pub fn new(model: SemanticModel, vocab: Vocab, link: OfdmLink) -> Self {
        SemanticSystem {
            model,
            vocab,
            link,
            constellation: Constellation::qam16(),
        }
    }
}

/// One semantic HARQ session. Round 1 sends the first `initial_blocks`
/// blocks; every NACK adds the next block. After each round the decoder sees
/// all blocks received so far (hard decisions). Acceptance compares with the
/// original sentence.
pub fn run_scharq(
    sentence: &Sentence,
    snr_db: f64,
    policy: &HarqPolicy,
    system: &SemanticSystem,
    rng: &mut Stream,
) -> Result<SessionResult> {
    policy.validate()?;
    if policy.scheme != Scheme::Scharq {
        return Err(Error::InvalidArgument("policy is not semantic".into()));
    }
    let total = system.model.config.blocks;
    let k0 = policy.initial_blocks.min(total);
    let rounds = policy.max_rounds.min(total - k0 + 1);
    let ids = system.model.ids(sentence, &system.vocab);
    let blocks = system.model.encode(&ids)?;
    let mut received: Vec<CodewordBlock> = Vec::with_capacity(total);
    let mut trace = Vec::with_capacity(rounds);
    let mut bits_sent = 0;
    let mut decoded = Vec::new();
    let mut similarity = 0.0;
    let mut success = false;
    for round in 1..=rounds {
        let batch = if round == 1 {
            &blocks[..k0]
        } else {
            &blocks[k0 + round - 2..k0 + round - 1]
        };
        let mut bits = BitVector::new();
        for b in batch {
            bits.extend_from(&b.bits);
        }
        let (rx, symbols, frames) = send_hard(&bits, &system.constellation, &system.link, snr_db, rng)?;
        let mut off = 0;
        for b in batch {
            received.push(CodewordBlock {
                index: b.index,
                bits: rx.slice(off, off + b.bits.len())?,
            });
            off += b.bits.len();
        }
        bits_sent += bits.len();
        decoded = system.model.decode(&received)?.tokens(&system.vocab);
        similarity = sim_edit(&decoded, &sentence.tokens);
        success = match policy.acceptance {
            Acceptance::ExactMatch => decoded == sentence.tokens,
            Acceptance::Similarity(t) => accept(similarity, t),
            Acceptance::Crc => unreachable!("rejected by validate"),
        };
        trace.push(RoundTrace {
            round,
            bits: bits.len(),
            symbols,
            frames,
            accepted: success,
        });
        if success {
            break;
        }
    }
    Ok(SessionResult {
        scheme: policy.name(),
        success,
        rounds: trace.len(),
        bits_sent,
        similarity,
        decoded,
        trace,
    })
}

/// Single-shot semantic transmission of all blocks; returns the decoded
/// tokens and their word-edit similarity to the original.
pub fn transmit_semantic(
    sentence: &Sentence,
    snr_db: f64,
    system: &SemanticSystem,
    rng: &mut Stream,
) -> Result<(Vec<String>, f64)> {
    let ids = system.model.ids(sentence, &system.vocab);
    let blocks = system.model.encode(&ids)?;
    let mut bits = BitVector::new();
    for b in &blocks {
        bits.extend_from(&b.bits);
    }
    let (rx, _, _) = send_hard(&bits, &system.constellation, &system.link, snr_db, rng)?;
    let per = system.model.config.bits_per_block();
    let received = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            Ok(CodewordBlock {
                index: b.index,
                bits: rx.slice(i * per, (i + 1) * per)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decoded = system.model.decode(&received)?.tokens(&system.vocab);
    let sim = sim_edit(&decoded, &sentence.tokens);
    Ok((decoded, sim))
}

/// Block errors of full-length codewords (all `n` code bits, no shortening)
/// sent in one pass over `link`, out of `blocks` random messages.
pub fn codeword_block_errors(
    code: &LdpcCode,
    link: &OfdmLink,
    constellation: &Constellation,
    snr_db: f64,
    blocks: usize,
    max_iters: usize,
    rng: &mut Stream,
) -> Result<usize> {
    let mut errors = 0;
    for _ in 0..blocks {
        let info: BitVector = (0..code.k()).map(|_| rng.random_bool(0.5)).collect();
        let word = code.encode(&info)?;
        let (llrs, _, _) = send_soft(&word, constellation, link, snr_db, rng)?;
        if decode_bp(&llrs, code, max_iters)?.info != info {
            errors += 1;
        }
    }
    Ok(errors)
}
