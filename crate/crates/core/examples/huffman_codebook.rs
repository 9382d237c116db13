//! Builds a canonical Huffman code from a synthetic corpus and reports code
//! lengths, the Kraft sum and the mean encoded sentence length.
//!
//! `cargo run --release --example huffman_codebook -- [lines]`

use anyhow::Result;
use semlink::corpus::{parse_corpus, synth, MAX_WORDS, MIN_WORDS};
use semlink::huffman::{corpus_frequencies, HuffmanTable};

fn main() -> Result<()> {
    let lines: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let corpus = parse_corpus(&synth::generate_corpus(lines, 2).join("\n"), MIN_WORDS, MAX_WORDS)?;
    let texts: Vec<String> = corpus.sentences.iter().map(|s| s.text()).collect();
    let (train, test) = texts.split_at(texts.len() * 9 / 10);
    let table = HuffmanTable::build(&corpus_frequencies(train))?;
    let mut lengths = table.lengths().to_vec();
    lengths.sort_by_key(|&(_, l)| l);
    println!("{} symbols, Kraft sum {:.6}", lengths.len(), table.kraft_sum());
    for (sym, len) in lengths.iter().take(8) {
        println!("  {sym:?}: {len} bits, code {}", table.code(*sym).unwrap());
    }
    let mut total = 0;
    for t in test {
        let bits = table.encode(t)?;
        total += bits.len();
        assert!(table.decode(&bits).is_clean());
    }
    println!(
        "{} held-out sentences, mean {:.1} bits per sentence",
        test.len(),
        total as f64 / test.len() as f64
    );
    let example = &test[0];
    println!("{example:?} -> {} bits", table.encode(example)?.len());
    Ok(())
}
