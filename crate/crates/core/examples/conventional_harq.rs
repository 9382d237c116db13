//! Conventional IR-HARQ (Huffman + CRC + LDPC + 16-QAM over OFDM) on a
//! synthetic corpus: success rate, rounds and bits per sentence against SNR.
//!
//! `cargo run --release --example conventional_harq -- [sentences]`

use anyhow::Result;
use semlink::corpus::{parse_corpus, synth, MAX_WORDS, MIN_WORDS};
use semlink::fec::LdpcCode;
use semlink::harq::{run_sessions, ConventionalSystem, HarqPolicy, SchemeRunner, SweepRow};
use semlink::huffman::{corpus_frequencies, HuffmanTable};
use semlink::phy::{ChannelModel, CsiMode, OfdmConfig, OfdmLink};

fn main() -> Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(300);
    let corpus = parse_corpus(&synth::generate_corpus(20_000, 3).join("\n"), MIN_WORDS, MAX_WORDS)?;
    let texts: Vec<String> = corpus.sentences.iter().map(|s| s.text()).collect();
    let huffman = HuffmanTable::build(&corpus_frequencies(&texts))?;
    let link = OfdmLink::new(OfdmConfig::default(), ChannelModel::default(), CsiMode::LeastSquares)?;
    let system = ConventionalSystem::new(huffman, LdpcCode::construct(1)?, link)?;
    let policy = HarqPolicy::conventional();
    let runner = SchemeRunner::Conventional(&system, &policy);
    let sentences = &corpus.sentences[..n];
    println!(
        "{:>6} {:>8} {:>18} {:>10} {:>8}",
        "snr_db", "success", "wilson95", "bits", "sim"
    );
    for snr in [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0] {
        let sessions = run_sessions(&runner, snr, sentences, 1, 1)?;
        let row = SweepRow::from_sessions(snr, &policy, &sessions, 1);
        println!(
            "{snr:>6} {:>8.3} [{:.3}, {:.3}] {:>10.1} {:>8.3}",
            row.success_rate, row.wilson_low, row.wilson_high, row.mean_bits, row.mean_similarity
        );
    }
    Ok(())
}
