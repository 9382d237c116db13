//! Uncoded 16-QAM bit error rate over the OFDM link for AWGN and multipath
//! fading, with least-squares or perfect channel knowledge.
//!
//! `cargo run --release --example link_ber -- [bits]`

use anyhow::Result;
use rand::Rng;
use semlink::bits::BitVector;
use semlink::modulation::{demod_hard, qam16_modulate, Constellation};
use semlink::phy::{ChannelModel, CsiMode, OfdmConfig, OfdmLink};
use semlink::rng;

fn main() -> Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200_000);
    let qam = Constellation::qam16();
    let mut r = rng::stream(7);
    let bits: BitVector = (0..n).map(|_| r.random_bool(0.5)).collect();
    let tx = qam16_modulate(&bits);
    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "snr_db", "awgn", "fading_ls", "fading_csi"
    );
    for snr in [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 14.0, 18.0] {
        let mut row = Vec::new();
        for (channel, csi) in [
            (ChannelModel::Awgn, CsiMode::Perfect),
            (ChannelModel::default(), CsiMode::LeastSquares),
            (ChannelModel::default(), CsiMode::Perfect),
        ] {
            let link = OfdmLink::new(OfdmConfig::default(), channel, csi)?;
            let out = link.transmit(&tx.symbols, qam.points(), snr, &mut r)?;
            let z: Vec<_> = out.equalized.iter().map(|e| e.symbol).collect();
            let g: Vec<_> = out.equalized.iter().map(|e| e.gain).collect();
            let rx = demod_hard(&z, &g, &qam);
            row.push(rx.hamming_distance(&bits) as f64 / n as f64);
        }
        println!("{snr:>6} {:>10.5} {:>10.5} {:>10.5}", row[0], row[1], row[2]);
    }
    Ok(())
}
