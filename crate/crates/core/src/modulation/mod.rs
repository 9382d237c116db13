//! 16-point constellations: Gray 16-QAM, learned point sets, soft and hard
//! detection.

mod learned;

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};

pub use learned::{
    mapper_gradient_error, train_codec_for_constellation, train_constellation, ConstellationEpoch,
    ConstellationTraining, MapperInit, MapperParams, TrainedConstellation,
};

pub const POINTS: usize = 16;
pub const BITS_PER_SYMBOL: usize = 4;

/// Sixteen points indexed by their 4-bit label (first bit most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
}

/// Gray code for one 4-PAM axis: label bits → amplitude.
const GRAY_PAM: [(u8, f64); 4] = [(0b00, -3.0), (0b01, -1.0), (0b11, 1.0), (0b10, 3.0)];

impl Constellation {
    /// Accepts points whose average power is one within 1e−9.
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.len() != POINTS {
            return Err(Error::Shape(format!("{} constellation points", points.len())));
        }
        let c = Constellation { points };
        let p = c.average_power();
        if (p - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("average power {p} is not unit")));
        }
        Ok(c)
    }

    /// Rescales arbitrary points to unit average power.
    pub fn normalized(points: Vec<Complex64>) -> Result<Self> {
        let p = points.iter().map(|z| z.norm_sqr()).sum::<f64>() / points.len().max(1) as f64;
        if p <= 0.0 || !p.is_finite() {
            return Err(Error::InvalidArgument("degenerate constellation".into()));
        }
        let s = 1.0 / p.sqrt();
        Self::new(points.into_iter().map(|z| z * s).collect())
    }

    /// Gray-mapped 16-QAM on {±1, ±3}² / √10. The first two label bits pick
    /// the in-phase level, the last two the quadrature level, each axis using
    /// 00 → −3, 01 → −1, 11 → +1, 10 → +3.
    pub fn qam16() -> Self {
        let level = |bits: u8| GRAY_PAM.iter().find(|(b, _)| *b == bits).unwrap().1;
        let s = 1.0 / 10f64.sqrt();
        let points = (0..POINTS as u8)
            .map(|label| Complex64::new(level(label >> 2) * s, level(label & 0b11) * s))
            .collect();
        Constellation { points }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: u8) -> Complex64 {
        self.points[label as usize]
    }

    pub fn average_power(&self) -> f64 {
        self.points.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Nearest-neighbour distance of each point.
    pub fn nearest_neighbor_distances(&self) -> Vec<f64> {
        (0..POINTS)
            .map(|i| {
                (0..POINTS)
                    .filter(|&j| j != i)
                    .map(|j| (self.points[i] - self.points[j]).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Population variance of all 120 pairwise distances.
    pub fn pairwise_distance_variance(&self) -> f64 {
        let mut d = Vec::with_capacity(POINTS * (POINTS - 1) / 2);
        for i in 0..POINTS {
            for j in i + 1..POINTS {
                d.push((self.points[i] - self.points[j]).norm());
            }
        }
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / d.len() as f64
    }

    /// Label of the point closest to `z / gain`.
    pub fn nearest(&self, z: Complex64, gain: f64) -> u8 {
        let mut best = (f64::INFINITY, 0u8);
        for (label, p) in self.points.iter().enumerate() {
            let d = (z - p * gain).norm_sqr();
            if d < best.0 {
                best = (d, label as u8);
            }
        }
        best.1
    }

    pub fn to_file(&self) -> ConstellationFile {
        ConstellationFile {
            points: self
                .points
                .iter()
                .enumerate()
                .map(|(label, z)| LabeledPoint {
                    label: label as u8,
                    i: z.re,
                    q: z.im,
                })
                .collect(),
            average_power: self.average_power(),
        }
    }

    pub fn from_file(file: &ConstellationFile) -> Result<Self> {
        let mut points = vec![None; POINTS];
        for p in &file.points {
            let slot = points
                .get_mut(p.label as usize)
                .ok_or_else(|| Error::Format(format!("label {} out of range", p.label)))?;
            if slot.replace(Complex64::new(p.i, p.q)).is_some() {
                return Err(Error::Format(format!("label {} repeated", p.label)));
            }
        }
        let points = points
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Format("labels do not cover 0..16".into()))?;
        Self::new(points)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(&self.to_file())?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_file(&serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub label: u8,
    pub i: f64,
    pub q: f64,
}

/// On-disk constellation: 16 labeled points and their measured average power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstellationFile {
    pub points: Vec<LabeledPoint>,
    pub average_power: f64,
}

/// Symbols plus the number of zero bits appended to reach a multiple of four.
#[derive(Clone, Debug, PartialEq)]
pub struct Modulated {
    pub symbols: Vec<Complex64>,
    pub pad_bits: usize,
}

pub fn bits_to_labels(bits: &BitVector) -> (Vec<u8>, usize) {
    let pad = (BITS_PER_SYMBOL - bits.len() % BITS_PER_SYMBOL) % BITS_PER_SYMBOL;
    let mut raw = bits.as_slice().to_vec();
    raw.extend(std::iter::repeat_n(0, pad));
    let labels = raw
        .chunks(BITS_PER_SYMBOL)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
        .collect();
    (labels, pad)
}

pub fn labels_to_bits(labels: &[u8]) -> BitVector {
    labels
        .iter()
        .flat_map(|&l| (0..BITS_PER_SYMBOL).rev().map(move |k| (l >> k) & 1 == 1))
        .collect()
}

pub fn modulate(bits: &BitVector, constellation: &Constellation) -> Modulated {
    let (labels, pad_bits) = bits_to_labels(bits);
    Modulated {
        symbols: labels.iter().map(|&l| constellation.point(l)).collect(),
        pad_bits,
    }
}

pub fn qam16_modulate(bits: &BitVector) -> Modulated {
    modulate(bits, &Constellation::qam16())
}

pub fn modulate_learned(bits: &BitVector, constellation: &Constellation) -> Modulated {
    modulate(bits, constellation)
}

/// Max-log LLRs, four per symbol, positive favouring bit 0:
/// (min over points with bit 1 − min over points with bit 0) of |z − g·p|²,
/// divided by the noise variance. Zero gain yields zero LLRs.
pub fn demod_soft(
    symbols: &[Complex64],
    gains: &[f64],
    noise_vars: &[f64],
    constellation: &Constellation,
) -> Result<Vec<f64>> {
    if symbols.len() != gains.len() || symbols.len() != noise_vars.len() {
        return Err(Error::Shape(
            "symbols, gains and noise variances differ in length".into(),
        ));
    }
    let mut out = Vec::with_capacity(symbols.len() * BITS_PER_SYMBOL);
    for ((&z, &g), &nv) in symbols.iter().zip(gains).zip(noise_vars) {
        if g == 0.0 {
            out.extend([0.0; BITS_PER_SYMBOL]);
            continue;
        }
        if nv <= 0.0 {
            return Err(Error::InvalidArgument(format!("noise variance {nv}")));
        }
        let d: Vec<f64> = constellation.points().iter().map(|p| (z - p * g).norm_sqr()).collect();
        for k in (0..BITS_PER_SYMBOL).rev() {
            let (mut d0, mut d1) = (f64::INFINITY, f64::INFINITY);
            for (label, &dist) in d.iter().enumerate() {
                if (label >> k) & 1 == 0 {
                    d0 = d0.min(dist);
                } else {
                    d1 = d1.min(dist);
                }
            }
            out.push((d1 - d0) / nv);
        }
    }
    Ok(out)
}

/// Nearest-point hard decisions.
pub fn demod_hard(symbols: &[Complex64], gains: &[f64], constellation: &Constellation) -> BitVector {
    let labels: Vec<u8> = symbols
        .iter()
        .zip(gains)
        .map(|(&z, &g)| constellation.nearest(z, g))
        .collect();
    labels_to_bits(&labels)
}

/// Posterior over the 16 labels: softmax of −|y − p_i|² / σ².
pub fn soft_detect(y: Complex64, constellation: &Constellation, noise_var: f64) -> Result<[f64; POINTS]> {
    if noise_var <= 0.0 {
        return Err(Error::InvalidArgument(format!("noise variance {noise_var}")));
    }
    Ok(posterior(y, constellation.points(), noise_var))
}

pub(crate) fn posterior(y: Complex64, points: &[Complex64], noise_var: f64) -> [f64; POINTS] {
    let mut logits = [0.0; POINTS];
    for (l, p) in logits.iter_mut().zip(points) {
        *l = -(y - p).norm_sqr() / noise_var;
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - max).exp();
        sum += *l;
    }
    logits.iter_mut().for_each(|l| *l /= sum);
    logits
}
