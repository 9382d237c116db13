//! Joint source-channel codec for sentences.
//!
//! A sentence of up to `max_len` token ids is embedded position by position,
//! squeezed through two tanh layers into `code_bits` reals and quantized by
//! sign. The bits are cut into `blocks` equal codeword blocks. The decoder
//! sees ±1 for every received bit, 0 for bits of missing blocks, plus one
//! presence flag per block, and predicts a token per position.

use ndarray::{s, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::corpus::{Sentence, Vocab, EOS, PAD};
use crate::error::{Error, Result};
use crate::nn::{softmax, softmax_cross_entropy_rows, Adam, Affine, Checkpoint, Model, Parameter};
use crate::rng::{self, Stream};

pub const MAX_CODE_BITS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodecConfig {
    pub max_len: usize,
    pub embed_dim: usize,
    pub hidden: usize,
    pub code_bits: usize,
    pub blocks: usize,
    pub vocab_size: usize,
}

impl CodecConfig {
    /// 960 bits in 6 blocks of 160.
    pub fn harq(vocab_size: usize) -> Self {
        CodecConfig {
            max_len: 30,
            embed_dim: 32,
            hidden: 256,
            code_bits: 960,
            blocks: 6,
            vocab_size,
        }
    }

    /// 320 bits in one block: 80 symbols of 4 bits.
    pub fn modulation(vocab_size: usize) -> Self {
        CodecConfig {
            code_bits: 320,
            blocks: 1,
            ..Self::harq(vocab_size)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.code_bits == 0 || self.code_bits > MAX_CODE_BITS {
            return bad(format!("code length {} outside 1..={MAX_CODE_BITS}", self.code_bits));
        }
        if self.blocks == 0 || self.code_bits % self.blocks != 0 {
            return bad(format!(
                "{} bits do not split into {} blocks",
                self.code_bits, self.blocks
            ));
        }
        if self.vocab_size < 4 || self.max_len == 0 || self.embed_dim == 0 || self.hidden == 0 {
            return bad("degenerate codec dimensions".into());
        }
        Ok(())
    }

    pub fn bits_per_block(&self) -> usize {
        self.code_bits / self.blocks
    }
}

/// One incremental redundancy unit, `index` in `1..=blocks`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordBlock {
    pub index: usize,
    pub bits: BitVector,
}

/// Decoder output: token ids up to (not including) the first EOS/PAD, with
/// the softmax maximum at each kept position.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedSentence {
    pub ids: Vec<usize>,
    pub confidence: Vec<f64>,
}

impl DecodedSentence {
    pub fn tokens(&self, vocab: &Vocab) -> Vec<String> {
        vocab.decode(&self.ids)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemanticModel {
    pub config: CodecConfig,
    pub embedding: Parameter,
    pub enc1: Affine,
    pub enc2: Affine,
    pub dec1: Affine,
    pub dec2: Affine,
    pub out: Affine,
}

impl Model for SemanticModel {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        let mut v = vec![&mut self.embedding];
        for layer in [
            &mut self.enc1,
            &mut self.enc2,
            &mut self.dec1,
            &mut self.dec2,
            &mut self.out,
        ] {
            v.extend(layer.params_mut());
        }
        v
    }
}

const PARAM_NAMES: [&str; 11] = [
    "embedding",
    "enc1.w",
    "enc1.b",
    "enc2.w",
    "enc2.b",
    "dec1.w",
    "dec1.b",
    "dec2.w",
    "dec2.b",
    "out.w",
    "out.b",
];

pub(crate) struct EncoderCache {
    ids: Vec<Vec<usize>>,
    x0: Array2<f64>,
    h1: Array2<f64>,
    /// tanh outputs before the sign quantizer
    pub(crate) u: Array2<f64>,
}

pub(crate) struct DecoderCache {
    input: Array2<f64>,
    g1: Array2<f64>,
    g2: Array2<f64>,
}

fn tanh_backward(y: &Array2<f64>, g: &Array2<f64>) -> Array2<f64> {
    g * &y.mapv(|v| 1.0 - v * v)
}

/// Token targets for one sentence: ids then EOS when it fits.
pub fn targets_for(ids: &[usize], max_len: usize) -> Vec<usize> {
    let mut t: Vec<usize> = ids.iter().copied().take(max_len).collect();
    if t.len() < max_len {
        t.push(EOS);
    }
    t
}

impl SemanticModel {
    pub fn new(config: CodecConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut r = rng::stream(seed);
        let c = &config;
        Ok(SemanticModel {
            embedding: Parameter::glorot(c.vocab_size, c.embed_dim, &mut r),
            enc1: Affine::glorot(c.max_len * c.embed_dim, c.hidden, &mut r),
            enc2: Affine::glorot(c.hidden, c.code_bits, &mut r),
            dec1: Affine::glorot(c.code_bits + c.blocks, c.hidden, &mut r),
            dec2: Affine::glorot(c.hidden, c.max_len * c.embed_dim, &mut r),
            out: Affine::glorot(c.embed_dim, c.vocab_size, &mut r),
            config,
        })
    }

    /// Token ids of a sentence, truncated to `max_len`.
    pub fn ids(&self, sentence: &Sentence, vocab: &Vocab) -> Vec<usize> {
        let mut ids = vocab.encode(&sentence.tokens);
        ids.truncate(self.config.max_len);
        ids
    }

    fn check_ids(&self, ids: &[usize]) -> Result<()> {
        if ids.len() > self.config.max_len {
            return Err(Error::Size(format!(
                "{} tokens exceed the {}-token limit",
                ids.len(),
                self.config.max_len
            )));
        }
        if let Some(&bad) = ids.iter().find(|&&i| i >= self.config.vocab_size) {
            return Err(Error::OutOfRange {
                index: bad,
                len: self.config.vocab_size,
            });
        }
        Ok(())
    }

    pub(crate) fn encoder_forward(&self, batch: &[&[usize]]) -> Result<EncoderCache> {
        let c = &self.config;
        let d = c.embed_dim;
        let mut ids = Vec::with_capacity(batch.len());
        let mut x0 = Array2::zeros((batch.len(), c.max_len * d));
        for (b, seq) in batch.iter().enumerate() {
            self.check_ids(seq)?;
            let mut padded = seq.to_vec();
            padded.resize(c.max_len, PAD);
            for (t, &id) in padded.iter().enumerate() {
                x0.slice_mut(s![b, t * d..(t + 1) * d])
                    .assign(&self.embedding.value.row(id));
            }
            ids.push(padded);
        }
        let h1 = self.enc1.forward(&x0)?.mapv(f64::tanh);
        let u = self.enc2.forward(&h1)?.mapv(f64::tanh);
        Ok(EncoderCache { ids, x0, h1, u })
    }

    /// Backpropagates dL/du (straight through the sign quantizer).
    pub(crate) fn encoder_backward(&mut self, cache: &EncoderCache, grad_u: &Array2<f64>) -> Result<()> {
        let d = self.config.embed_dim;
        let g = tanh_backward(&cache.u, grad_u);
        let gh1 = self.enc2.backward(&cache.h1, &g)?;
        let g = tanh_backward(&cache.h1, &gh1);
        let gx0 = self.enc1.backward(&cache.x0, &g)?;
        for (b, ids) in cache.ids.iter().enumerate() {
            for (t, &id) in ids.iter().enumerate() {
                let mut row = self.embedding.grad.row_mut(id);
                row += &gx0.slice(s![b, t * d..(t + 1) * d]);
            }
        }
        Ok(())
    }

    pub(crate) fn decoder_forward(&self, input: Array2<f64>) -> Result<DecoderCache> {
        let g1 = self.dec1.forward(&input)?.mapv(f64::tanh);
        let g2 = self.dec2.forward(&g1)?.mapv(f64::tanh);
        Ok(DecoderCache { input, g1, g2 })
    }

    /// Mean token cross-entropy against `targets` (one list per batch row).
    /// With `backward`, accumulates decoder gradients and returns dL/dinput.
    pub(crate) fn decoder_loss(
        &mut self,
        cache: &DecoderCache,
        targets: &[Vec<usize>],
        backward: bool,
    ) -> Result<(f64, Option<Array2<f64>>)> {
        let d = self.config.embed_dim;
        let rows: Vec<(usize, usize)> = targets
            .iter()
            .enumerate()
            .flat_map(|(b, t)| (0..t.len()).map(move |p| (b, p)))
            .collect();
        let flat: Vec<usize> = targets.iter().flatten().copied().collect();
        let mut h = Array2::zeros((rows.len(), d));
        for (r, &(b, p)) in rows.iter().enumerate() {
            h.row_mut(r).assign(&cache.g2.slice(s![b, p * d..(p + 1) * d]));
        }
        let logits = self.out.forward(&h)?;
        let (loss, glogits) = softmax_cross_entropy_rows(&logits, &flat)?;
        if !backward {
            return Ok((loss, None));
        }
        let gh = self.out.backward(&h, &glogits)?;
        let mut gg2 = Array2::zeros(cache.g2.raw_dim());
        for (r, &(b, p)) in rows.iter().enumerate() {
            gg2.slice_mut(s![b, p * d..(p + 1) * d]).assign(&gh.row(r));
        }
        let g = tanh_backward(&cache.g2, &gg2);
        let gg1 = self.dec2.backward(&cache.g1, &g)?;
        let g = tanh_backward(&cache.g1, &gg1);
        let gin = self.dec1.backward(&cache.input, &g)?;
        Ok((loss, Some(gin)))
    }

    /// Deterministic encoding into `blocks` codeword blocks (bit 1 ⇔ u ≥ 0).
    pub fn encode(&self, ids: &[usize]) -> Result<Vec<CodewordBlock>> {
        let cache = self.encoder_forward(&[ids])?;
        let bits: BitVector = cache.u.row(0).iter().map(|&v| v >= 0.0).collect();
        let per = self.config.bits_per_block();
        (0..self.config.blocks)
            .map(|i| {
                Ok(CodewordBlock {
                    index: i + 1,
                    bits: bits.slice(i * per, (i + 1) * per)?,
                })
            })
            .collect()
    }

    /// Decoder input row for a set of received blocks.
    pub fn input_for(&self, blocks: &[CodewordBlock]) -> Result<Vec<f64>> {
        let c = &self.config;
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("no codeword blocks to decode".into()));
        }
        let per = c.bits_per_block();
        let mut row = vec![0.0; c.code_bits + c.blocks];
        for blk in blocks {
            if blk.index == 0 || blk.index > c.blocks {
                return Err(Error::OutOfRange {
                    index: blk.index,
                    len: c.blocks,
                });
            }
            if blk.bits.len() != per {
                return Err(Error::Size(format!(
                    "block {} has {} bits, expected {per}",
                    blk.index,
                    blk.bits.len()
                )));
            }
            if row[c.code_bits + blk.index - 1] != 0.0 {
                return Err(Error::InvalidArgument(format!("block {} repeated", blk.index)));
            }
            let off = (blk.index - 1) * per;
            for (j, b) in blk.bits.iter().enumerate() {
                row[off + j] = if b { 1.0 } else { -1.0 };
            }
            row[c.code_bits + blk.index - 1] = 1.0;
        }
        Ok(row)
    }

    /// Decodes any non-empty subset of blocks.
    pub fn decode(&self, blocks: &[CodewordBlock]) -> Result<DecodedSentence> {
        let row = self.input_for(blocks)?;
        let input = Array2::from_shape_vec((1, row.len()), row).map_err(|e| Error::Shape(e.to_string()))?;
        Ok(self.decode_inputs(input)?.remove(0))
    }

    /// Decodes raw decoder input rows (bit values in [−1, 1] then block flags).
    pub fn decode_inputs(&self, input: Array2<f64>) -> Result<Vec<DecodedSentence>> {
        let c = &self.config;
        if input.ncols() != c.code_bits + c.blocks {
            return Err(Error::Shape(format!("decoder input width {}", input.ncols())));
        }
        let cache = self.decoder_forward(input)?;
        let d = c.embed_dim;
        let batch = cache.g2.nrows();
        let h = cache
            .g2
            .to_shape((batch * c.max_len, d))
            .map_err(|e| Error::Shape(e.to_string()))?
            .to_owned();
        let logits = self.out.forward(&h)?;
        let mut out = Vec::with_capacity(batch);
        for b in 0..batch {
            let mut ids = Vec::new();
            let mut confidence = Vec::new();
            for p in 0..c.max_len {
                let row = logits.row(b * c.max_len + p);
                let probs = softmax(row);
                let (best, &conf) = probs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
                if best == EOS || best == PAD {
                    break;
                }
                ids.push(best);
                confidence.push(conf);
            }
            out.push(DecodedSentence { ids, confidence });
        }
        Ok(out)
    }

    pub fn embedding_row(&self, id: usize) -> Option<Vec<f64>> {
        (id < self.config.vocab_size).then(|| self.embedding.value.row(id).to_vec())
    }

    fn arrays(&self) -> [&Parameter; 11] {
        [
            &self.embedding,
            &self.enc1.weight,
            &self.enc1.bias,
            &self.enc2.weight,
            &self.enc2.bias,
            &self.dec1.weight,
            &self.dec1.bias,
            &self.dec2.weight,
            &self.dec2.bias,
            &self.out.weight,
            &self.out.bias,
        ]
    }

    pub fn to_checkpoint(&self) -> Result<Checkpoint> {
        let mut ck = Checkpoint::new(serde_json::to_value(&self.config)?);
        for (name, p) in PARAM_NAMES.iter().zip(self.arrays()) {
            ck.insert(name, &p.value);
        }
        Ok(ck)
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        let config: CodecConfig = serde_json::from_value(ck.config.clone())?;
        let mut model = Self::new(config, 0)?;
        for (name, p) in PARAM_NAMES.iter().zip(model.params_mut()) {
            let a = ck.get(name)?;
            if a.dim() != p.value.dim() {
                return Err(Error::Format(format!(
                    "array '{name}' has shape {:?}, expected {:?}",
                    a.dim(),
                    p.value.dim()
                )));
            }
            *p = Parameter::new(a);
        }
        Ok(model)
    }
}

/// Training hyperparameters for [`train_codec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Per-batch bit-flip probability is drawn uniformly from this range.
    pub flip_range: (f64, f64),
    /// Probability that each block is present (at least one always is).
    pub keep_prob: f64,
    /// Share of the training sentences held out for model selection.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 64,
            learning_rate: 1e-3,
            flip_range: (0.0, 0.15),
            keep_prob: 0.7,
            validation_fraction: 0.05,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
}

/// Random channel applied to one batch: flip signs and block presence.
pub(crate) struct ChannelDraw {
    flips: Array2<f64>,
    keep: Array2<f64>,
}

impl ChannelDraw {
    pub(crate) fn sample(config: &CodecConfig, batch: usize, flip_prob: f64, keep_prob: f64, r: &mut Stream) -> Self {
        let flips = Array2::from_shape_simple_fn((batch, config.code_bits), || {
            if r.random_bool(flip_prob) {
                -1.0
            } else {
                1.0
            }
        });
        let mut keep = Array2::zeros((batch, config.blocks));
        for mut row in keep.rows_mut() {
            for v in row.iter_mut() {
                *v = if r.random_bool(keep_prob) { 1.0 } else { 0.0 };
            }
            if row.sum() == 0.0 {
                row[r.random_range(0..config.blocks)] = 1.0;
            }
        }
        ChannelDraw { flips, keep }
    }

    /// Decoder input for quantized values `q` and the per-bit multiplier used
    /// for the backward pass.
    pub(crate) fn apply(&self, config: &CodecConfig, q: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        let per = config.bits_per_block();
        let mut mult = self.flips.clone();
        for (mut row, keep) in mult.rows_mut().into_iter().zip(self.keep.rows()) {
            for (j, v) in row.iter_mut().enumerate() {
                *v *= keep[j / per];
            }
        }
        let bits = q * &mult;
        let mut input = Array2::zeros((q.nrows(), config.code_bits + config.blocks));
        input.slice_mut(s![.., ..config.code_bits]).assign(&bits);
        input.slice_mut(s![.., config.code_bits..]).assign(&self.keep);
        (input, mult)
    }
}

/// Quantizer choice for [`batch_loss`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantizer {
    /// Sign, with a straight-through gradient.
    Hard,
    /// Identity; the whole path is differentiable (used for gradient checks).
    Soft,
}

/// Loss of one batch through encoder, quantizer, channel draw and decoder.
/// With `backward`, gradients are accumulated into `model`.
pub fn batch_loss(
    model: &mut SemanticModel,
    batch: &[&[usize]],
    channel: &ChannelDrawHandle,
    quantizer: Quantizer,
    backward: bool,
) -> Result<f64> {
    let enc = model.encoder_forward(batch)?;
    let q = match quantizer {
        Quantizer::Hard => enc.u.mapv(|v| if v >= 0.0 { 1.0 } else { -1.0 }),
        Quantizer::Soft => enc.u.clone(),
    };
    let (input, mult) = channel.0.apply(&model.config, &q);
    let targets: Vec<Vec<usize>> = batch.iter().map(|ids| targets_for(ids, model.config.max_len)).collect();
    let dec = model.decoder_forward(input)?;
    let (loss, gin) = model.decoder_loss(&dec, &targets, backward)?;
    if let Some(gin) = gin {
        let gq = gin.slice(s![.., ..model.config.code_bits]).to_owned() * &mult;
        // straight-through: |u| ≤ 1 always holds after tanh, so the clip is a no-op
        model.encoder_backward(&enc, &gq)?;
    }
    Ok(loss)
}

/// Opaque channel draw for [`batch_loss`].
pub struct ChannelDrawHandle(pub(crate) ChannelDraw);

impl ChannelDrawHandle {
    pub fn sample(config: &CodecConfig, batch: usize, flip_prob: f64, keep_prob: f64, seed: u64) -> Self {
        ChannelDrawHandle(ChannelDraw::sample(
            config,
            batch,
            flip_prob,
            keep_prob,
            &mut rng::stream(seed),
        ))
    }
}

/// Mean loss over `data` with channel randomness fixed by `seed`.
pub fn evaluate_loss(
    model: &mut SemanticModel,
    data: &[Vec<usize>],
    flip_range: (f64, f64),
    keep_prob: f64,
    batch_size: usize,
    seed: u64,
) -> Result<f64> {
    let mut r = rng::stream(seed);
    let mut total = 0.0;
    let mut count = 0.0;
    for chunk in data.chunks(batch_size.max(1)) {
        let p = sample_flip(flip_range, &mut r);
        let draw = ChannelDrawHandle(ChannelDraw::sample(&model.config, chunk.len(), p, keep_prob, &mut r));
        let refs: Vec<&[usize]> = chunk.iter().map(Vec::as_slice).collect();
        total += batch_loss(model, &refs, &draw, Quantizer::Hard, false)? * chunk.len() as f64;
        count += chunk.len() as f64;
    }
    Ok(if count > 0.0 { total / count } else { 0.0 })
}

fn sample_flip(range: (f64, f64), r: &mut Stream) -> f64 {
    if range.1 > range.0 {
        r.random_range(range.0..range.1)
    } else {
        range.0
    }
}

/// Trains a codec on `train`, keeping the parameters with the lowest held-out loss.
pub fn train_codec(
    train: &[Sentence],
    vocab: &Vocab,
    config: CodecConfig,
    tc: &TrainConfig,
) -> Result<(SemanticModel, Vec<EpochLog>)> {
    train_codec_from(SemanticModel::new(config, tc.seed)?, train, vocab, tc)
}

/// Continues training an existing model.
pub fn train_codec_from(
    mut model: SemanticModel,
    train: &[Sentence],
    vocab: &Vocab,
    tc: &TrainConfig,
) -> Result<(SemanticModel, Vec<EpochLog>)> {
    if train.is_empty() {
        return Err(Error::InvalidArgument("empty training split".into()));
    }
    let (lo, hi) = tc.flip_range;
    if !(0.0..=0.5).contains(&lo) || !(lo..=0.5).contains(&hi) {
        return Err(Error::InvalidArgument(format!("flip range {:?}", tc.flip_range)));
    }
    let mut r = rng::derived_stream(tc.seed, &[rng::tag("codec-train")]);
    let mut data: Vec<Vec<usize>> = train.iter().map(|s| model.ids(s, vocab)).collect();
    data.shuffle(&mut r);
    let n_val = ((data.len() as f64 * tc.validation_fraction).round() as usize).min(data.len() - 1);
    let validation = data.split_off(data.len() - n_val);
    let val_seed = rng::derive_seed(tc.seed, &[rng::tag("validation")]);
    let mut opt = Adam::new(tc.learning_rate);
    let mut best = (f64::INFINITY, model.clone());
    let mut log = Vec::with_capacity(tc.epochs);
    for epoch in 1..=tc.epochs {
        data.shuffle(&mut r);
        let mut sum = 0.0;
        let mut batches = 0;
        for (bi, chunk) in data.chunks(tc.batch_size.max(1)).enumerate() {
            let p = sample_flip(tc.flip_range, &mut r);
            let draw = ChannelDrawHandle(ChannelDraw::sample(&model.config, chunk.len(), p, tc.keep_prob, &mut r));
            let refs: Vec<&[usize]> = chunk.iter().map(Vec::as_slice).collect();
            model.zero_grad();
            let loss = batch_loss(&mut model, &refs, &draw, Quantizer::Hard, true)?;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    batch: bi,
                    detail: format!(
                        "loss {loss} after {batches} batches, mean so far {}",
                        sum / batches.max(1) as f64
                    ),
                });
            }
            opt.step(&mut model.params_mut());
            sum += loss;
            batches += 1;
        }
        let validation_loss = if validation.is_empty() {
            sum / batches as f64
        } else {
            evaluate_loss(&mut model, &validation, tc.flip_range, tc.keep_prob, 256, val_seed)?
        };
        log.push(EpochLog {
            epoch,
            train_loss: sum / batches as f64,
            validation_loss,
        });
        if validation_loss < best.0 {
            best = (validation_loss, model.clone());
        }
    }
    Ok((best.1, log))
}

/// Largest relative error between analytic and central-difference gradients
/// of a small random batch on the soft (identity-quantizer) path.
pub fn soft_path_gradient_error(config: CodecConfig, seed: u64) -> Result<f64> {
    let mut model = SemanticModel::new(config, seed)?;
    let mut r = rng::derived_stream(seed, &[rng::tag("gradcheck-batch")]);
    let (v, max_len) = (model.config.vocab_size, model.config.max_len);
    let batch: Vec<Vec<usize>> = (0..4)
        .map(|_| {
            let len = r.random_range(1..=max_len);
            (0..len).map(|_| r.random_range(3..v)).collect()
        })
        .collect();
    let draw = ChannelDrawHandle(ChannelDraw::sample(&model.config, batch.len(), 0.1, 0.7, &mut r));
    let mut failure = None;
    let err = crate::nn::gradient_check(
        &mut model,
        |m, backward| {
            let refs: Vec<&[usize]> = batch.iter().map(Vec::as_slice).collect();
            batch_loss(m, &refs, &draw, Quantizer::Soft, backward).unwrap_or_else(|e| {
                failure = Some(e);
                f64::NAN
            })
        },
        1e-5,
        400,
        seed,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(err),
    }
}
