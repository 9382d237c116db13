//! Trains a small semantic codec on a synthetic corpus and reports the
//! per-epoch loss and how often sentences survive a noiseless roundtrip.
//!
//! `cargo run --release --example train_codec -- [sentences] [epochs]`

use std::time::Instant;

use anyhow::Result;
use semlink::codec::{train_codec, CodecConfig, TrainConfig};
use semlink::corpus::{parse_corpus, split_corpus, synth, Vocab, MAX_WORDS, MIN_WORDS};

fn main() -> Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(20_000);
    let epochs = args.get(1).copied().unwrap_or(3);
    let text = synth::generate_corpus(n + n / 10 + n / 5, 1).join("\n");
    let corpus = parse_corpus(&text, MIN_WORDS, MAX_WORDS)?;
    let split = split_corpus(&corpus.sentences, n, n / 10, 1)?;
    let vocab = Vocab::build(&split.train, 5000)?;
    println!(
        "{} train / {} test sentences, vocabulary {}",
        split.train.len(),
        split.test.len(),
        vocab.len()
    );
    let tc = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    let start = Instant::now();
    let (model, log) = train_codec(&split.train, &vocab, CodecConfig::harq(vocab.len()), &tc)?;
    for e in &log {
        println!(
            "epoch {:>3}  train {:.4}  validation {:.4}",
            e.epoch, e.train_loss, e.validation_loss
        );
    }
    println!("trained in {:.1} s", start.elapsed().as_secs_f64());
    for k in 1..=model.config.blocks {
        let exact = split
            .test
            .iter()
            .filter(|s| {
                let ids = model.ids(s, &vocab);
                let blocks = model.encode(&ids).unwrap();
                model.decode(&blocks[..k]).unwrap().tokens(&vocab) == s.tokens
            })
            .count();
        println!(
            "{k} block(s), noiseless exact match {:.3}",
            exact as f64 / split.test.len() as f64
        );
    }
    Ok(())
}
