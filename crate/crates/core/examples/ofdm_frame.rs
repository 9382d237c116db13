//! One OFDM block through a multipath channel: roundtrip error, PAPR, and
//! least-squares channel estimation error against the true response.
//!
//! `cargo run --release --example ofdm_frame -- [snr_db]`

use anyhow::Result;
use num_complex::Complex64;
use rand::Rng;
use semlink::modulation::Constellation;
use semlink::phy::{apply_channel, estimate_channel, papr_db, ChannelRealization, FrameGrid, Ofdm, OfdmConfig};
use semlink::rng;

fn main() -> Result<()> {
    let snr: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10.0);
    let cfg = OfdmConfig::default();
    let ofdm = Ofdm::new(cfg.clone());
    let qam = Constellation::qam16();
    let mut r = rng::stream(3);
    let data: Vec<Complex64> = (0..cfg.data_capacity())
        .map(|_| qam.point(r.random_range(0..16)))
        .collect();
    let grid = FrameGrid::new(&cfg, &cfg.pilot(), &data)?;
    let tx = ofdm.modulate(&grid)?;
    let back = ofdm.demodulate(&tx)?;
    let err = grid
        .rows
        .iter()
        .flatten()
        .zip(back.rows.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!(
        "{} samples per block, roundtrip error {err:.2e}, PAPR {:.2} dB",
        tx.len(),
        papr_db(&tx)?
    );

    let h = ChannelRealization::draw(8, 3.0, &mut r);
    let freq = h.frequency_response(cfg.subcarriers);
    let rx = ofdm.demodulate(&apply_channel(&tx, &h, snr, &mut r)?)?;
    let est = estimate_channel(&rx.rows[0], &cfg.pilot());
    let mse = est.iter().zip(&freq).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / freq.len() as f64;
    println!(
        "channel taps |h|^2: {:?}",
        h.taps
            .iter()
            .map(|t| format!("{:.3}", t.norm_sqr()))
            .collect::<Vec<_>>()
    );
    println!(
        "LS estimate at {snr} dB: mean squared error {mse:.4}, noise variance {:.4}",
        10f64.powf(-snr / 10.0)
    );
    for k in (0..cfg.subcarriers).step_by(16) {
        println!(
            "  subcarrier {k:>2}: |H| {:.3}  |H_ls| {:.3}",
            freq[k].norm(),
            est[k].norm()
        );
    }
    Ok(())
}
