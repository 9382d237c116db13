//! Block error rate of the full-length LDPC code (rate 460/1472) with 16-QAM
//! over the OFDM link, for AWGN and multipath fading.
//!
//! `cargo run --release --example ldpc_bler -- [blocks]`

use anyhow::Result;
use semlink::fec::{LdpcCode, DEFAULT_MAX_ITERS};
use semlink::harq::{codeword_block_errors, wilson_interval};
use semlink::modulation::Constellation;
use semlink::phy::{ChannelModel, CsiMode, OfdmConfig, OfdmLink};
use semlink::rng;

fn main() -> Result<()> {
    let blocks: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(300);
    let code = LdpcCode::construct(1)?;
    let qam = Constellation::qam16();
    for (label, channel, csi) in [
        ("awgn", ChannelModel::Awgn, CsiMode::Perfect),
        ("fading_csi", ChannelModel::default(), CsiMode::Perfect),
        ("fading_ls", ChannelModel::default(), CsiMode::LeastSquares),
    ] {
        let link = OfdmLink::new(OfdmConfig::default(), channel, csi)?;
        for snr in [0.0, 2.0, 4.0, 6.0, 8.0, 10.0] {
            let mut r = rng::derived_stream(1, &[rng::tag(label), f64::to_bits(snr)]);
            let e = codeword_block_errors(&code, &link, &qam, snr, blocks, DEFAULT_MAX_ITERS, &mut r)?;
            let (lo, hi) = wilson_interval(e, blocks);
            println!(
                "{label:<11} {snr:>5} dB  BLER {:.4} [{lo:.4}, {hi:.4}]",
                e as f64 / blocks as f64
            );
        }
    }
    Ok(())
}
