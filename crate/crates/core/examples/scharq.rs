//! Semantic HARQ against conventional HARQ on a synthetic corpus. Trains a
//! codec (or loads one from the given checkpoint path) and prints success
//! rates per SNR.
//!
//! `cargo run --release --example scharq -- [checkpoint] [train] [epochs] [sentences] [max_flip_percent]`

use std::path::Path;

use anyhow::Result;
use semlink::codec::{train_codec, CodecConfig, SemanticModel, TrainConfig};
use semlink::corpus::{parse_corpus, split_corpus, synth, Vocab, MAX_WORDS, MIN_WORDS};
use semlink::harq::{run_sessions, HarqPolicy, SchemeRunner, SemanticSystem, SweepRow};
use semlink::nn::Checkpoint;
use semlink::phy::{ChannelModel, CsiMode, OfdmConfig, OfdmLink};

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ckpt = args.first().cloned().unwrap_or_else(|| "scharq_codec.json".into());
    let num = |i: usize, d: usize| args.get(i).and_then(|a| a.parse().ok()).unwrap_or(d);
    let (n_train, epochs, n_eval) = (num(1, 20_000), num(2, 10), num(3, 300));
    let max_flip = num(4, 15) as f64 / 100.0;
    let corpus = parse_corpus(
        &synth::generate_corpus(n_train * 6 / 5 + 2000, 1).join("\n"),
        MIN_WORDS,
        MAX_WORDS,
    )?;
    let split = split_corpus(&corpus.sentences, n_train, 1000, 1)?;
    let vocab = Vocab::build(&split.train, 5000)?;
    let model = if Path::new(&ckpt).exists() {
        SemanticModel::from_checkpoint(&Checkpoint::load(&ckpt)?)?
    } else {
        let tc = TrainConfig {
            epochs,
            flip_range: (0.0, max_flip),
            ..TrainConfig::default()
        };
        let (model, log) = train_codec(&split.train, &vocab, CodecConfig::harq(vocab.len()), &tc)?;
        for e in &log {
            println!(
                "epoch {:>3}  train {:.4}  validation {:.4}",
                e.epoch, e.train_loss, e.validation_loss
            );
        }
        model.to_checkpoint()?.save(&ckpt)?;
        model
    };
    let link = OfdmLink::new(OfdmConfig::default(), ChannelModel::default(), CsiMode::LeastSquares)?;
    let system = SemanticSystem::new(model, vocab, link);
    let sentences = &split.test[..n_eval.min(split.test.len())];
    for policy in [HarqPolicy::scharq_exact(), HarqPolicy::scharq_similarity(0.98)] {
        let runner = SchemeRunner::Scharq(&system, &policy);
        for snr in [0.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0, f64::INFINITY] {
            let sessions = run_sessions(&runner, snr, sentences, 1, 1)?;
            let row = SweepRow::from_sessions(snr, &policy, &sessions, 1);
            println!(
                "{:<16} {snr:>6} success {:.3} [{:.3}, {:.3}] bits {:>6.1} sim {:.3}",
                row.scheme, row.success_rate, row.wilson_low, row.wilson_high, row.mean_bits, row.mean_similarity
            );
        }
    }
    Ok(())
}
