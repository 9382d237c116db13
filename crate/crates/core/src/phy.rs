//! OFDM physical layer: framing, unitary (I)FFT with cyclic prefix, block
//! fading multipath channel, least-squares pilot estimation, MMSE
//! equalization and PAPR measurement.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OfdmConfig {
    pub subcarriers: usize,
    /// OFDM symbols per block, pilot included.
    pub symbols: usize,
    pub cp_len: usize,
    pub pilot_seed: u64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            subcarriers: 64,
            symbols: 8,
            cp_len: 16,
            pilot_seed: 0x5EED,
        }
    }
}

impl OfdmConfig {
    /// Data resource elements per block; the first symbol is the pilot.
    pub fn data_capacity(&self) -> usize {
        (self.symbols - 1) * self.subcarriers
    }

    pub fn samples_per_block(&self) -> usize {
        self.symbols * (self.subcarriers + self.cp_len)
    }

    /// Unit-magnitude QPSK pilot fixed by `pilot_seed`.
    pub fn pilot(&self) -> Vec<Complex64> {
        let mut r = rng::stream(self.pilot_seed);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        (0..self.subcarriers)
            .map(|_| {
                let re = if r.random_bool(0.5) { a } else { -a };
                let im = if r.random_bool(0.5) { a } else { -a };
                Complex64::new(re, im)
            })
            .collect()
    }
}

/// Frequency-domain block: `symbols` rows of `subcarriers` values, row 0 the pilot.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameGrid {
    pub rows: Vec<Vec<Complex64>>,
}

impl FrameGrid {
    /// Pilot row followed by `data` in row-major order. `data` must fill the
    /// block exactly.
    pub fn new(cfg: &OfdmConfig, pilot: &[Complex64], data: &[Complex64]) -> Result<FrameGrid> {
        if pilot.len() != cfg.subcarriers || data.len() != cfg.data_capacity() {
            return Err(Error::Shape(format!(
                "pilot {} / data {} for a {}x{} grid",
                pilot.len(),
                data.len(),
                cfg.symbols,
                cfg.subcarriers
            )));
        }
        let mut rows = vec![pilot.to_vec()];
        rows.extend(data.chunks(cfg.subcarriers).map(<[_]>::to_vec));
        Ok(FrameGrid { rows })
    }

    pub fn data(&self) -> Vec<Complex64> {
        self.rows[1..].iter().flatten().copied().collect()
    }

    pub fn energy(&self) -> f64 {
        self.rows.iter().flatten().map(|z| z.norm_sqr()).sum()
    }
}

/// Planned transforms for one configuration.
#[derive(Clone)]
pub struct Ofdm {
    cfg: OfdmConfig,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Ofdm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ofdm").field("cfg", &self.cfg).finish()
    }
}

impl Ofdm {
    pub fn new(cfg: OfdmConfig) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(cfg.subcarriers);
        let ifft = planner.plan_fft_inverse(cfg.subcarriers);
        Ofdm { cfg, fft, ifft }
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    /// Per-symbol IFFT scaled by 1/√N, cyclic prefix prepended.
    pub fn modulate(&self, grid: &FrameGrid) -> Result<Vec<Complex64>> {
        let n = self.cfg.subcarriers;
        if grid.rows.len() != self.cfg.symbols || grid.rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("grid does not match the OFDM configuration".into()));
        }
        let scale = 1.0 / (n as f64).sqrt();
        let mut out = Vec::with_capacity(self.cfg.samples_per_block());
        for row in &grid.rows {
            let mut buf = row.clone();
            self.ifft.process(&mut buf);
            buf.iter_mut().for_each(|z| *z *= scale);
            out.extend_from_slice(&buf[n - self.cfg.cp_len..]);
            out.extend_from_slice(&buf);
        }
        Ok(out)
    }

    /// Strips the cyclic prefix and applies the unitary FFT.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<FrameGrid> {
        let n = self.cfg.subcarriers;
        let sym_len = n + self.cfg.cp_len;
        if samples.len() != self.cfg.samples_per_block() {
            return Err(Error::Shape(format!(
                "{} samples for a {}-sample block",
                samples.len(),
                self.cfg.samples_per_block()
            )));
        }
        let scale = 1.0 / (n as f64).sqrt();
        let rows = samples
            .chunks(sym_len)
            .map(|s| {
                let mut buf = s[self.cfg.cp_len..].to_vec();
                self.fft.process(&mut buf);
                buf.iter_mut().for_each(|z| *z *= scale);
                buf
            })
            .collect();
        Ok(FrameGrid { rows })
    }
}

/// Complex baseband taps of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn identity() -> Self {
        ChannelRealization {
            taps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Normalized exponential power-delay profile: tap l has mean power
    /// proportional to 10^(−decay_db·l/10), summing to one.
    pub fn profile(n_taps: usize, decay_db: f64) -> Vec<f64> {
        let raw: Vec<f64> = (0..n_taps).map(|l| 10f64.powf(-decay_db * l as f64 / 10.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / s).collect()
    }

    /// Independent zero-mean complex Gaussian taps.
    pub fn draw(n_taps: usize, decay_db: f64, rng: &mut impl Rng) -> Self {
        let taps = Self::profile(n_taps, decay_db)
            .into_iter()
            .map(|p| complex_gaussian(p, rng))
            .collect();
        ChannelRealization { taps }
    }

    /// H_k = Σ_l h_l e^{−j2πkl/N}.
    pub fn frequency_response(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                self.taps
                    .iter()
                    .enumerate()
                    .map(|(l, h)| h * Complex64::from_polar(1.0, -2.0 * PI * (k * l) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }
}

/// Circularly-symmetric Gaussian sample with total variance `var`.
pub fn complex_gaussian(var: f64, rng: &mut impl Rng) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Per-sample noise variance for unit signal power.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// Linear convolution (truncated to the input length) plus white noise at
/// `snr_db` per sample. `+∞` disables noise.
pub fn apply_channel(
    samples: &[Complex64],
    h: &ChannelRealization,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Complex64>> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(format!("snr {snr_db} dB")));
    }
    let nv = noise_variance(snr_db);
    let out = (0..samples.len())
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, tap) in h.taps.iter().enumerate().take(i + 1) {
                acc += tap * samples[i - l];
            }
            if nv > 0.0 {
                acc += complex_gaussian(nv, rng);
            }
            acc
        })
        .collect();
    Ok(out)
}

/// Least-squares estimate Y_k / X_k.
pub fn estimate_channel(rx_pilot: &[Complex64], pilot: &[Complex64]) -> Vec<Complex64> {
    rx_pilot.iter().zip(pilot).map(|(y, x)| y / x).collect()
}

/// One equalized resource element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Equalized {
    pub symbol: Complex64,
    /// Real gain g with E[symbol] = g·s.
    pub gain: f64,
    /// Residual noise variance of `symbol`.
    pub noise_var: f64,
}

/// Scalar MMSE per subcarrier: ŝ = Ĥ*·y / (|Ĥ|² + σ²).
/// `rows` are data symbols, each `h_est.len()` wide.
pub fn equalize(rows: &[Vec<Complex64>], h_est: &[Complex64], noise_var: f64) -> Result<Vec<Equalized>> {
    let mut out = Vec::with_capacity(rows.len() * h_est.len());
    for row in rows {
        if row.len() != h_est.len() {
            return Err(Error::Shape(format!(
                "{} subcarriers against {} estimates",
                row.len(),
                h_est.len()
            )));
        }
        for (y, h) in row.iter().zip(h_est) {
            let p = h.norm_sqr();
            let d = p + noise_var;
            if d == 0.0 {
                out.push(Equalized {
                    symbol: Complex64::new(0.0, 0.0),
                    gain: 0.0,
                    noise_var: 0.0,
                });
                continue;
            }
            out.push(Equalized {
                symbol: h.conj() * y / d,
                gain: p / d,
                noise_var: p * noise_var / (d * d),
            });
        }
    }
    Ok(out)
}

/// 10·log10(max|x|² / mean|x|²).
pub fn papr_db(samples: &[Complex64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("PAPR of an empty signal".into()));
    }
    let powers = samples.iter().map(|z| z.norm_sqr());
    let (max, sum) = powers.fold((0.0f64, 0.0), |(m, s), p| (m.max(p), s + p));
    let mean = sum / samples.len() as f64;
    Ok(10.0 * (max / mean).log10())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// Single unit tap.
    Awgn,
    /// Block fading with an exponential power-delay profile.
    Multipath { taps: usize, decay_db: f64 },
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel::Multipath { taps: 8, decay_db: 3.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CsiMode {
    /// Pilot-based LS estimate.
    #[default]
    LeastSquares,
    /// Genie frequency response.
    Perfect,
}

/// Output of one pass through [`OfdmLink::transmit`].
#[derive(Clone, Debug)]
pub struct LinkOutput {
    pub equalized: Vec<Equalized>,
    pub frames: usize,
}

/// Full transmit/receive chain for a symbol stream.
#[derive(Clone, Debug)]
pub struct OfdmLink {
    pub ofdm: Ofdm,
    pub pilot: Vec<Complex64>,
    pub channel: ChannelModel,
    pub csi: CsiMode,
}

impl OfdmLink {
    pub fn new(cfg: OfdmConfig, channel: ChannelModel, csi: CsiMode) -> Result<Self> {
        if let ChannelModel::Multipath { taps, .. } = channel {
            if taps == 0 || taps > cfg.cp_len {
                return Err(Error::InvalidArgument(format!(
                    "{taps} taps do not fit a {}-sample cyclic prefix",
                    cfg.cp_len
                )));
            }
        }
        let pilot = cfg.pilot();
        Ok(OfdmLink {
            ofdm: Ofdm::new(cfg),
            pilot,
            channel,
            csi,
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        self.ofdm.config()
    }

    /// Packs `symbols` into as many blocks as needed (one fresh channel draw
    /// per block). Unused resource elements carry random points from
    /// `filler` so every block has the same average power.
    pub fn transmit(
        &self,
        symbols: &[Complex64],
        filler: &[Complex64],
        snr_db: f64,
        rng: &mut Stream,
    ) -> Result<LinkOutput> {
        let cfg = self.config();
        let cap = cfg.data_capacity();
        let nv = noise_variance(snr_db);
        let mut equalized = Vec::with_capacity(symbols.len());
        let mut frames = 0;
        for chunk in symbols.chunks(cap) {
            frames += 1;
            let h = match self.channel {
                ChannelModel::Awgn => ChannelRealization::identity(),
                ChannelModel::Multipath { taps, decay_db } => ChannelRealization::draw(taps, decay_db, rng),
            };
            let mut data = chunk.to_vec();
            while data.len() < cap {
                data.push(*filler.choose(rng).unwrap_or(&Complex64::new(0.0, 0.0)));
            }
            let grid = FrameGrid::new(cfg, &self.pilot, &data)?;
            let tx = self.ofdm.modulate(&grid)?;
            let rx = apply_channel(&tx, &h, snr_db, rng)?;
            let rx_grid = self.ofdm.demodulate(&rx)?;
            let (h_est, eq_nv) = match self.csi {
                // LS error adds σ²/|pilot|² = σ² to every estimate
                CsiMode::LeastSquares => (estimate_channel(&rx_grid.rows[0], &self.pilot), 2.0 * nv),
                CsiMode::Perfect => (h.frequency_response(cfg.subcarriers), nv),
            };
            let eq = equalize(&rx_grid.rows[1..], &h_est, eq_nv)?;
            equalized.extend_from_slice(&eq[..chunk.len()]);
        }
        Ok(LinkOutput { equalized, frames })
    }
}
