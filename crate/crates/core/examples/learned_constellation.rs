//! Trains a 16-point constellation jointly with a single-block semantic
//! codec and compares its geometry with Gray 16-QAM.
//!
//! `cargo run --release --example learned_constellation -- [sentences] [codec_epochs] [epochs]`

use std::time::Instant;

use anyhow::Result;
use semlink::codec::{train_codec, CodecConfig, TrainConfig};
use semlink::corpus::{parse_corpus, synth, Vocab, MAX_WORDS, MIN_WORDS};
use semlink::modulation::{train_constellation, Constellation, ConstellationTraining};

fn main() -> Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(5000);
    let codec_epochs = args.get(1).copied().unwrap_or(5);
    let epochs = args.get(2).copied().unwrap_or(3);
    let corpus = parse_corpus(&synth::generate_corpus(n * 11 / 10, 5).join("\n"), MIN_WORDS, MAX_WORDS)?;
    let train = &corpus.sentences[..n.min(corpus.sentences.len())];
    let vocab = Vocab::build(train, 20_000)?;
    let tc = TrainConfig {
        epochs: codec_epochs,
        ..TrainConfig::default()
    };
    let (codec, _) = train_codec(train, &vocab, CodecConfig::modulation(vocab.len()), &tc)?;
    let ct = ConstellationTraining {
        epochs,
        ..ConstellationTraining::default()
    };
    let start = Instant::now();
    let trained = train_constellation(codec, train, &vocab, &ct)?;
    println!("trained in {:.1} s", start.elapsed().as_secs_f64());
    for e in &trained.log {
        println!(
            "epoch {:>2}  train {:.4}  eval {:.4}",
            e.epoch, e.train_loss, e.eval_loss
        );
    }
    for (name, c) in [("qam16", Constellation::qam16()), ("trained", trained.constellation)] {
        let nn = c.nearest_neighbor_distances();
        let (lo, hi) = nn
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &d| (l.min(d), h.max(d)));
        println!(
            "{name:<8} power {:.6}  pairwise-distance variance {:.4}  nearest-neighbour max/min {:.3}",
            c.average_power(),
            c.pairwise_distance_variance(),
            hi / lo
        );
        if name == "trained" {
            for (label, p) in c.points().iter().enumerate() {
                println!("  {label:04b}  {:+.4} {:+.4}j", p.re, p.im);
            }
        }
    }
    Ok(())
}
