//! End-to-end training of a 16-point constellation through the semantic codec.
//!
//! Codec bits are grouped into nibbles, mapped to points, passed through an
//! AWGN channel and soft-detected. The posterior-weighted bit values feed the
//! codec decoder, so the token cross-entropy is differentiable with respect
//! to every point. The encoder receives the bit gradient straight through.

use ndarray::{s, Array2};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{posterior, Constellation, BITS_PER_SYMBOL, POINTS};
use crate::codec::{targets_for, SemanticModel};
use crate::corpus::{Sentence, Vocab};
use crate::error::{Error, Result};
use crate::nn::{Adam, Affine, Model, Parameter};
use crate::phy::{complex_gaussian, noise_variance};
use crate::rng::{self, Stream};

/// One-hot(16) → affine → tanh → power normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct MapperParams {
    pub layer: Affine,
}

impl Model for MapperParams {
    fn params_mut(&mut self) -> Vec<&mut Parameter> {
        self.layer.params_mut().into_iter().collect()
    }
}

/// Intermediate values of one mapper evaluation.
struct MapperForward {
    /// tanh outputs before normalization
    raw: Vec<Complex64>,
    points: Vec<Complex64>,
    scale: f64,
}

impl MapperParams {
    pub fn new(seed: u64) -> Self {
        let mut r = rng::stream(seed);
        MapperParams {
            layer: Affine::glorot(POINTS, 2, &mut r),
        }
    }

    /// Parameters whose normalized output is exactly [`Constellation::qam16`].
    pub fn qam16() -> Self {
        // tanh outputs ±0.25 and ±0.75 are the QAM levels up to a common scale.
        let points = Constellation::qam16();
        let scale = 0.75 / points.points().iter().map(|p| p.re.abs()).fold(0.0, f64::max);
        let mut layer = Affine::new(Parameter::zeros(POINTS, 2), Parameter::zeros(1, 2));
        for (k, p) in points.points().iter().enumerate() {
            layer.weight.value[[k, 0]] = (p.re * scale).atanh();
            layer.weight.value[[k, 1]] = (p.im * scale).atanh();
        }
        MapperParams { layer }
    }

    fn forward(&self) -> Result<MapperForward> {
        let w = &self.layer.weight.value;
        let b = &self.layer.bias.value;
        let raw: Vec<Complex64> = (0..POINTS)
            .map(|k| Complex64::new((w[[k, 0]] + b[[0, 0]]).tanh(), (w[[k, 1]] + b[[0, 1]]).tanh()))
            .collect();
        let power = raw.iter().map(|z| z.norm_sqr()).sum::<f64>() / POINTS as f64;
        if power <= 0.0 || !power.is_finite() {
            return Err(Error::InvalidArgument("mapper collapsed to the origin".into()));
        }
        let scale = power.sqrt().recip();
        let points = raw.iter().map(|z| z * scale).collect();
        Ok(MapperForward { raw, points, scale })
    }

    /// Current point set; fails if the power invariant is violated.
    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::new(self.forward()?.points)
    }

    /// Accumulates parameter gradients from dL/dpoint (re, im packed as complex).
    fn backward(&mut self, fwd: &MapperForward, grad_points: &[Complex64]) {
        let n = POINTS as f64;
        let dot: f64 = grad_points
            .iter()
            .zip(&fwd.points)
            .map(|(g, p)| g.re * p.re + g.im * p.im)
            .sum();
        for k in 0..POINTS {
            let gq = (grad_points[k] - fwd.points[k] * (dot / n)) * fwd.scale;
            let q = fwd.raw[k];
            let gre = gq.re * (1.0 - q.re * q.re);
            let gim = gq.im * (1.0 - q.im * q.im);
            self.layer.weight.grad[[k, 0]] += gre;
            self.layer.weight.grad[[k, 1]] += gim;
            self.layer.bias.grad[[0, 0]] += gre;
            self.layer.bias.grad[[0, 1]] += gim;
        }
    }
}

/// Starting point of the trainable mapper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapperInit {
    /// Seeded Glorot weights, zero bias.
    Glorot,
    /// The Gray 16-QAM point set.
    Qam16,
}

/// Hyperparameters for [`train_constellation`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstellationTraining {
    pub snr_train_db: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub mapper_learning_rate: f64,
    pub codec_learning_rate: f64,
    /// Also update the codec; otherwise it stays frozen.
    pub joint: bool,
    /// Sentences held out (from the front of the training list) to log the loss.
    pub eval_size: usize,
    pub init: MapperInit,
    pub seed: u64,
}

impl Default for ConstellationTraining {
    fn default() -> Self {
        ConstellationTraining {
            snr_train_db: 8.0,
            epochs: 5,
            batch_size: 64,
            mapper_learning_rate: 1e-2,
            codec_learning_rate: 1e-4,
            joint: true,
            eval_size: 512,
            init: MapperInit::Qam16,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstellationEpoch {
    pub epoch: usize,
    pub train_loss: f64,
    /// Loss on the fixed evaluation subset with fixed noise.
    pub eval_loss: f64,
}

#[derive(Clone, Debug)]
pub struct TrainedConstellation {
    pub constellation: Constellation,
    pub mapper: Option<MapperParams>,
    pub codec: SemanticModel,
    /// Entry 0 is the loss before any update.
    pub log: Vec<ConstellationEpoch>,
}

/// Loss through bits → points → noise → soft detection → decoder.
/// With `backward`, returns dL/dpoint and, if `joint`, updates codec gradients.
fn e2e_loss(
    codec: &mut SemanticModel,
    points: &[Complex64],
    batch: &[&[usize]],
    noise: &[Complex64],
    noise_var: f64,
    backward: bool,
    joint: bool,
) -> Result<(f64, Vec<Complex64>)> {
    let cfg = codec.config.clone();
    let symbols = cfg.code_bits / BITS_PER_SYMBOL;
    let enc = codec.encoder_forward(batch)?;
    let mut input = Array2::zeros((batch.len(), cfg.code_bits + cfg.blocks));
    input.slice_mut(s![.., cfg.code_bits..]).fill(1.0);
    let sign = |label: usize, j: usize| {
        if (label >> (BITS_PER_SYMBOL - 1 - j)) & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    };
    let mut cache = Vec::with_capacity(batch.len() * symbols);
    for b in 0..batch.len() {
        for t in 0..symbols {
            let label = (0..BITS_PER_SYMBOL).fold(0usize, |acc, j| {
                (acc << 1) | (enc.u[[b, t * BITS_PER_SYMBOL + j]] >= 0.0) as usize
            });
            let y = points[label] + noise[b * symbols + t];
            let post = posterior(y, points, noise_var);
            for j in 0..BITS_PER_SYMBOL {
                input[[b, t * BITS_PER_SYMBOL + j]] = (0..POINTS).map(|i| post[i] * sign(i, j)).sum::<f64>();
            }
            cache.push((label, y, post));
        }
    }
    let targets: Vec<Vec<usize>> = batch.iter().map(|ids| targets_for(ids, cfg.max_len)).collect();
    let dec = codec.decoder_forward(input)?;
    let (loss, gin) = codec.decoder_loss(&dec, &targets, backward)?;
    let mut grad_points = vec![Complex64::new(0.0, 0.0); POINTS];
    let Some(gin) = gin else {
        return Ok((loss, grad_points));
    };
    for b in 0..batch.len() {
        for t in 0..symbols {
            let (label, y, post) = &cache[b * symbols + t];
            let gx = |j: usize| gin[[b, t * BITS_PER_SYMBOL + j]];
            let gpost: Vec<f64> = (0..POINTS)
                .map(|i| (0..BITS_PER_SYMBOL).map(|j| gx(j) * sign(i, j)).sum())
                .collect();
            let mean: f64 = (0..POINTS).map(|i| post[i] * gpost[i]).sum();
            let mut gy = Complex64::new(0.0, 0.0);
            for i in 0..POINTS {
                let gz = post[i] * (gpost[i] - mean);
                let d = (y - points[i]) * (2.0 * gz / noise_var);
                grad_points[i] += d;
                gy -= d;
            }
            grad_points[*label] += gy;
        }
    }
    if joint {
        let gu = gin.slice(s![.., ..cfg.code_bits]).to_owned();
        codec.encoder_backward(&enc, &gu)?;
    }
    Ok((loss, grad_points))
}

fn draw_noise(n: usize, noise_var: f64, r: &mut Stream) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(noise_var, r)).collect()
}

enum Mapping {
    Trainable(MapperParams, Adam),
    Fixed(Constellation),
}

impl Mapping {
    fn points(&self) -> Result<Vec<Complex64>> {
        match self {
            Mapping::Trainable(m, _) => Ok(m.constellation()?.points().to_vec()),
            Mapping::Fixed(c) => Ok(c.points().to_vec()),
        }
    }
}

/// Jointly trains a mapper (and by default the codec) at `snr_train_db`.
pub fn train_constellation(
    codec: SemanticModel,
    train: &[Sentence],
    vocab: &Vocab,
    tc: &ConstellationTraining,
) -> Result<TrainedConstellation> {
    let mapper = match tc.init {
        MapperInit::Glorot => MapperParams::new(rng::derive_seed(tc.seed, &[rng::tag("mapper")])),
        MapperInit::Qam16 => MapperParams::qam16(),
    };
    run(
        codec,
        Mapping::Trainable(mapper, Adam::new(tc.mapper_learning_rate)),
        train,
        vocab,
        tc,
    )
}

/// Fine-tunes the codec alone for a fixed constellation under the same loop.
pub fn train_codec_for_constellation(
    codec: SemanticModel,
    constellation: &Constellation,
    train: &[Sentence],
    vocab: &Vocab,
    tc: &ConstellationTraining,
) -> Result<TrainedConstellation> {
    let tc = ConstellationTraining {
        joint: true,
        ..tc.clone()
    };
    run(codec, Mapping::Fixed(constellation.clone()), train, vocab, &tc)
}

fn run(
    mut codec: SemanticModel,
    mut mapping: Mapping,
    train: &[Sentence],
    vocab: &Vocab,
    tc: &ConstellationTraining,
) -> Result<TrainedConstellation> {
    let cfg = codec.config.clone();
    if cfg.blocks != 1 || cfg.code_bits % BITS_PER_SYMBOL != 0 {
        return Err(Error::InvalidArgument(format!(
            "constellation training needs a single-block codec with a multiple of 4 bits, got {} bits in {} blocks",
            cfg.code_bits, cfg.blocks
        )));
    }
    if tc.eval_size >= train.len() {
        return Err(Error::InvalidArgument(format!(
            "{} training sentences cannot spare {} for evaluation",
            train.len(),
            tc.eval_size
        )));
    }
    let symbols = cfg.code_bits / BITS_PER_SYMBOL;
    let nv = noise_variance(tc.snr_train_db);
    if nv <= 0.0 {
        return Err(Error::InvalidArgument("training SNR must be finite".into()));
    }
    let all: Vec<Vec<usize>> = train.iter().map(|s| codec.ids(s, vocab)).collect();
    let (eval, rest) = all.split_at(tc.eval_size);
    let mut data: Vec<&[usize]> = rest.iter().map(Vec::as_slice).collect();
    let eval: Vec<&[usize]> = eval.iter().map(Vec::as_slice).collect();
    let eval_noise = draw_noise(
        eval.len() * symbols,
        nv,
        &mut rng::derived_stream(tc.seed, &[rng::tag("eval-noise")]),
    );
    let evaluate = |codec: &mut SemanticModel, points: &[Complex64]| -> Result<f64> {
        let mut total = 0.0;
        for (i, chunk) in eval.chunks(256).enumerate() {
            let off = i * 256 * symbols;
            let noise = &eval_noise[off..off + chunk.len() * symbols];
            total += e2e_loss(codec, points, chunk, noise, nv, false, false)?.0 * chunk.len() as f64;
        }
        Ok(total / eval.len().max(1) as f64)
    };
    let initial = evaluate(&mut codec, &mapping.points()?)?;
    let mut log = vec![ConstellationEpoch {
        epoch: 0,
        train_loss: initial,
        eval_loss: initial,
    }];
    let mut r = rng::derived_stream(tc.seed, &[rng::tag("constellation-train")]);
    let mut codec_opt = Adam::new(tc.codec_learning_rate);
    for epoch in 1..=tc.epochs {
        data.shuffle(&mut r);
        let mut sum = 0.0;
        let mut batches = 0usize;
        for (bi, chunk) in data.chunks(tc.batch_size.max(1)).enumerate() {
            let noise = draw_noise(chunk.len() * symbols, nv, &mut r);
            codec.zero_grad();
            let loss = match &mut mapping {
                Mapping::Trainable(mapper, opt) => {
                    let fwd = mapper.forward()?;
                    let (loss, gp) = e2e_loss(&mut codec, &fwd.points, chunk, &noise, nv, true, tc.joint)?;
                    mapper.zero_grad();
                    mapper.backward(&fwd, &gp);
                    opt.step(&mut mapper.params_mut());
                    // every exposed point set must keep unit power
                    mapper.constellation()?;
                    loss
                }
                Mapping::Fixed(c) => {
                    let pts = c.points().to_vec();
                    e2e_loss(&mut codec, &pts, chunk, &noise, nv, true, true)?.0
                }
            };
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    batch: bi,
                    detail: format!("end-to-end loss {loss}"),
                });
            }
            if tc.joint {
                codec_opt.step(&mut codec.params_mut());
            }
            sum += loss;
            batches += 1;
        }
        let eval_loss = evaluate(&mut codec, &mapping.points()?)?;
        log.push(ConstellationEpoch {
            epoch,
            train_loss: sum / batches.max(1) as f64,
            eval_loss,
        });
    }
    let (constellation, mapper) = match mapping {
        Mapping::Trainable(m, _) => (m.constellation()?, Some(m)),
        Mapping::Fixed(c) => (c, None),
    };
    Ok(TrainedConstellation {
        constellation,
        mapper,
        codec,
        log,
    })
}

/// Largest relative gradient error of the mapper parameters through the
/// full end-to-end loss, on a small random codec with one block.
pub fn mapper_gradient_error(codec: crate::codec::CodecConfig, seed: u64) -> Result<f64> {
    #[test]
    fn qam_initialization_reproduces_gray_qam() {
        let c = MapperParams::qam16().constellation().unwrap();
        for (a, b) in c.points().iter().zip(Constellation::qam16().points()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    struct Problem {
        mapper: MapperParams,
        codec: SemanticModel,
    }
    impl Model for Problem {
        fn params_mut(&mut self) -> Vec<&mut Parameter> {
            self.mapper.params_mut()
        }
    }
    let mut p = Problem {
        mapper: MapperParams::new(seed),
        codec: SemanticModel::new(codec, seed)?,
    };
    let cfg = p.codec.config.clone();
    if cfg.blocks != 1 || cfg.code_bits % BITS_PER_SYMBOL != 0 {
        return Err(Error::InvalidArgument("mapper check needs a single-block codec".into()));
    }
    let mut r = rng::derived_stream(seed, &[rng::tag("mapper-gradcheck")]);
    let batch: Vec<Vec<usize>> = (0..3)
        .map(|_| {
            let len = rand::Rng::random_range(&mut r, 1..=cfg.max_len);
            (0..len)
                .map(|_| rand::Rng::random_range(&mut r, 3..cfg.vocab_size))
                .collect()
        })
        .collect();
    let noise_var = 0.3;
    let noise = draw_noise(batch.len() * cfg.code_bits / BITS_PER_SYMBOL, noise_var, &mut r);
    let mut failure = None;
    let err = crate::nn::gradient_check(
        &mut p,
        |p, backward| {
            let refs: Vec<&[usize]> = batch.iter().map(Vec::as_slice).collect();
            let run = p.mapper.forward().and_then(|fwd| {
                let (loss, gp) = e2e_loss(&mut p.codec, &fwd.points, &refs, &noise, noise_var, backward, false)?;
                if backward {
                    p.mapper.backward(&fwd, &gp);
                }
                Ok(loss)
            });
            run.unwrap_or_else(|e| {
                failure = Some(e);
                f64::NAN
            })
        },
        1e-6,
        100,
        seed,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(err),
    }
}
