//! Monte-Carlo sweeps over schemes and SNR points.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_conventional, run_scharq, ConventionalSystem, HarqPolicy, Scheme, SemanticSystem, SessionResult};
use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::rng;
use crate::similarity::MetricKind;

pub const CSV_HEADER: &str =
    "snr_db,scheme,acceptance,metric_name,success_rate,wilson_low,wilson_high,mean_bits,mean_similarity,n,seed";

/// 95% Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959963984540054;
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // at p̂ = 0 or 1 one bound equals p̂ exactly; keep it so despite rounding
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// A scheme together with the system it runs on.
#[derive(Clone, Copy, Debug)]
pub enum SchemeRunner<'a> {
    Conventional(&'a ConventionalSystem, &'a HarqPolicy),
    Scharq(&'a SemanticSystem, &'a HarqPolicy),
}

impl SchemeRunner<'_> {
    pub fn policy(&self) -> &HarqPolicy {
        match self {
            SchemeRunner::Conventional(_, p) | SchemeRunner::Scharq(_, p) => p,
        }
    }

    /// Randomness is keyed by scheme family, so every semantic acceptance
    /// rule sees the same channel realizations.
    fn family(&self) -> u64 {
        match self.policy().scheme {
            Scheme::Conventional => rng::tag("conventional"),
            Scheme::Scharq => rng::tag("scharq"),
        }
    }

    pub fn session_seed(&self, base: u64, snr_db: f64, index: usize) -> u64 {
        rng::derive_seed(base, &[self.family(), snr_db.to_bits(), index as u64])
    }

    pub fn run(&self, sentence: &Sentence, snr_db: f64, seed: u64) -> Result<SessionResult> {
        let mut r = rng::stream(seed);
        match self {
            SchemeRunner::Conventional(sys, p) => run_conventional(sentence, snr_db, p, sys, &mut r),
            SchemeRunner::Scharq(sys, p) => run_scharq(sentence, snr_db, p, sys, &mut r),
        }
    }
}

/// Runs every sentence once at `snr_db`, results in sentence order.
pub fn run_sessions(
    runner: &SchemeRunner<'_>,
    snr_db: f64,
    sentences: &[Sentence],
    base_seed: u64,
    workers: usize,
) -> Result<Vec<SessionResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    pool.install(|| {
        sentences
            .par_iter()
            .enumerate()
            .map(|(i, s)| runner.run(s, snr_db, runner.session_seed(base_seed, snr_db, i)))
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub scheme: String,
    pub acceptance: String,
    pub metric_name: String,
    pub successes: usize,
    pub n: usize,
    pub success_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub mean_bits: f64,
    pub mean_similarity: f64,
    pub seed: u64,
}

impl SweepRow {
    pub fn from_sessions(snr_db: f64, policy: &HarqPolicy, sessions: &[SessionResult], seed: u64) -> Self {
        let n = sessions.len();
        let successes = sessions.iter().filter(|s| s.success).count();
        let (wilson_low, wilson_high) = wilson_interval(successes, n);
        let mean = |f: &dyn Fn(&SessionResult) -> f64| {
            if n == 0 {
                0.0
            } else {
                sessions.iter().map(f).sum::<f64>() / n as f64
            }
        };
        SweepRow {
            snr_db,
            scheme: policy.name(),
            acceptance: policy.acceptance.label(),
            metric_name: MetricKind::WordEdit.name().into(),
            successes,
            n,
            success_rate: if n == 0 { 0.0 } else { successes as f64 / n as f64 },
            wilson_low,
            wilson_high,
            mean_bits: mean(&|s| s.bits_sent as f64),
            mean_similarity: mean(&|s| s.similarity),
            seed,
        }
    }
}

/// Numbers with 17 significant digits, so values survive a text roundtrip.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| a.scheme.cmp(&b.scheme).then(a.snr_db.total_cmp(&b.snr_db)));
    }

    pub fn get(&self, scheme: &str, snr_db: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.snr_db == snr_db)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                num(r.snr_db),
                r.scheme,
                r.acceptance,
                r.metric_name,
                num(r.success_rate),
                num(r.wilson_low),
                num(r.wilson_high),
                num(r.mean_bits),
                num(r.mean_similarity),
                r.n,
                r.seed
            );
        }
        out
    }
}

/// Runs every (scheme, SNR) pair over all sentences.
pub fn sweep(
    schemes: &[SchemeRunner<'_>],
    snrs: &[f64],
    sentences: &[Sentence],
    base_seed: u64,
    workers: usize,
) -> Result<SweepTable> {
    if schemes.is_empty() || snrs.is_empty() || sentences.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs schemes, SNR points and sentences".into(),
        ));
    }
    let mut table = SweepTable::default();
    for runner in schemes {
        for &snr in snrs {
            let sessions = run_sessions(runner, snr, sentences, base_seed, workers)?;
            table
                .rows
                .push(SweepRow::from_sessions(snr, runner.policy(), &sessions, base_seed));
        }
    }
    table.sort();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent Wilson bounds: roots of (p̂ − p)² = z² p (1 − p) / n.
    fn wilson_by_roots(k: usize, n: usize) -> (f64, f64) {
        let z2 = 1.959963984540054f64.powi(2);
        let (n, ph) = (n as f64, k as f64 / n as f64);
        let a = 1.0 + z2 / n;
        let b = -(2.0 * ph + z2 / n);
        let c = ph * ph;
        let d = (b * b - 4.0 * a * c).max(0.0).sqrt();
        ((-b - d) / (2.0 * a), (-b + d) / (2.0 * a))
    }

    #[test]
    fn wilson_matches_quadratic_roots() {
        for (k, n) in [(0, 10), (5, 10), (10, 10), (1, 2000), (1999, 2000), (37, 100)] {
            let (lo, hi) = wilson_interval(k, n);
            let (rl, rh) = wilson_by_roots(k, n);
            assert!((lo - rl.max(0.0)).abs() < 1e-12 && (hi - rh.min(1.0)).abs() < 1e-12);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
        // textbook value: 5/10 gives [0.2366, 0.7634]
        let (lo, hi) = wilson_interval(5, 10);
        assert!((lo - 0.2366).abs() < 1e-4 && (hi - 0.7634).abs() < 1e-4);
    }

    #[test]
    fn csv_numbers_roundtrip() {
        for x in [0.1, 1.0 / 3.0, 460.123456789, 0.0, 1e-300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(CSV_HEADER.split(',').count(), 11);
    }
}
