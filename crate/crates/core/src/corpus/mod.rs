//! Sentence corpus ingestion: tokenization, length filtering, deterministic
//! train/test splitting and vocabulary construction.

pub mod synth;
mod vocab;

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

pub use synth::{generate_corpus, write_corpus};
pub use vocab::{Vocab, EOS, PAD, UNK};

/// Characters stripped from both ends of every token.
pub const STRIP_CHARS: &[char] = &['.', ',', ';', ':', '!', '?', '"', '(', ')'];

pub const MIN_WORDS: usize = 4;
pub const MAX_WORDS: usize = 30;

/// One corpus line that survived length filtering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    /// Zero-based line index in the source file.
    pub line: usize,
    pub raw: String,
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(line: usize, raw: &str) -> Self {
        Sentence {
            line,
            raw: raw.to_string(),
            tokens: tokenize(raw),
        }
    }

    /// Normalized text: tokens joined by single spaces.
    pub fn text(&self) -> String {
        detokenize(&self.tokens)
    }
}

/// Lowercases, splits on whitespace and strips the punctuation in [`STRIP_CHARS`]
/// from both ends of each token. Tokens that become empty are dropped.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace()
        .map(|w| w.trim_matches(STRIP_CHARS).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    tokens.iter().map(|t| t.as_ref()).collect::<Vec<_>>().join(" ")
}

/// Result of loading a corpus file.
#[derive(Clone, Debug)]
pub struct LoadedCorpus {
    pub sentences: Vec<Sentence>,
    pub dropped: usize,
}

/// Filters `text` line by line, keeping sentences whose token count lies in
/// `[min_words, max_words]`. Word counts are taken after punctuation stripping.
pub fn parse_corpus(text: &str, min_words: usize, max_words: usize) -> Result<LoadedCorpus> {
    if min_words < 1 || max_words < min_words {
        return Err(Error::InvalidArgument(format!(
            "word bounds ({min_words}, {max_words}) are invalid"
        )));
    }
    let mut sentences = Vec::new();
    let mut dropped = 0;
    for (line, raw) in text.lines().enumerate() {
        let s = Sentence::new(line, raw);
        if (min_words..=max_words).contains(&s.tokens.len()) {
            sentences.push(s);
        } else {
            dropped += 1;
        }
    }
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus { dropped });
    }
    Ok(LoadedCorpus { sentences, dropped })
}

pub fn load_corpus(path: impl AsRef<Path>, min_words: usize, max_words: usize) -> Result<LoadedCorpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, min_words, max_words)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Vec<Sentence>,
    pub test: Vec<Sentence>,
    pub seed: u64,
}

/// Shuffles with a seeded stream, then takes the first `n_train` for training
/// and the next `n_test` for testing.
pub fn split_corpus(sentences: &[Sentence], n_train: usize, n_test: usize, seed: u64) -> Result<CorpusSplit> {
    if n_train + n_test > sentences.len() {
        return Err(Error::Size(format!(
            "requested {n_train} + {n_test} sentences but only {} available",
            sentences.len()
        )));
    }
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    order.shuffle(&mut rng::stream(seed));
    let pick = |idx: &[usize]| idx.iter().map(|&i| sentences[i].clone()).collect::<Vec<_>>();
    Ok(CorpusSplit {
        train: pick(&order[..n_train]),
        test: pick(&order[n_train..n_train + n_test]),
        seed,
    })
}

impl CorpusSplit {
    /// Text manifest: one source line index per line.
    pub fn manifest(sentences: &[Sentence]) -> String {
        let mut out = String::new();
        for s in sentences {
            out.push_str(&s.line.to_string());
            out.push('\n');
        }
        out
    }

    /// Rebuilds a split list from a manifest and the filtered corpus it indexes.
    pub fn from_manifest(manifest: &str, corpus: &[Sentence]) -> Result<Vec<Sentence>> {
        let by_line: std::collections::HashMap<usize, &Sentence> = corpus.iter().map(|s| (s.line, s)).collect();
        manifest
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let line: usize = l
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("bad manifest entry '{l}'")))?;
                by_line
                    .get(&line)
                    .map(|s| (*s).clone())
                    .ok_or_else(|| Error::Format(format!("manifest line {line} not in corpus")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Hello, world!"), vec!["hello", "world"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("It's (fine)."), vec!["it's", "fine"]);
        assert!(tokenize(" , ; ").is_empty());
    }

    #[test]
    fn load_boundaries() {
        let line31 = vec!["w"; 31].join(" ");
        let text = format!("a b c\na b c d\n{line31}\n");
        let c = parse_corpus(&text, 4, 30).unwrap();
        assert_eq!(c.sentences.len(), 1);
        assert_eq!(c.sentences[0].raw, "a b c d");
        assert_eq!(c.sentences[0].line, 1);
        assert_eq!(c.dropped, 2);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            parse_corpus("a b\nc\n", 4, 30),
            Err(Error::EmptyCorpus { dropped: 2 })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_corpus("/nonexistent/corpus.txt", 4, 30),
            Err(Error::Io { .. })
        ));
    }

    fn fixture(n: usize) -> Vec<Sentence> {
        (0..n)
            .map(|i| Sentence::new(i, &format!("sentence number {i} goes here")))
            .collect()
    }

    #[test]
    fn split_sizes_and_errors() {
        let s = fixture(20);
        let split = split_corpus(&s, 0, 0, 3).unwrap();
        assert!(split.train.is_empty() && split.test.is_empty());
        let split = split_corpus(&s, 12, 8, 3).unwrap();
        assert_eq!((split.train.len(), split.test.len()), (12, 8));
        assert!(matches!(split_corpus(&s, 15, 6, 3), Err(Error::Size(_))));
    }

    #[test]
    fn manifest_roundtrip() {
        let s = fixture(30);
        let split = split_corpus(&s, 10, 5, 11).unwrap();
        let m = CorpusSplit::manifest(&split.test);
        assert_eq!(CorpusSplit::from_manifest(&m, &s).unwrap(), split.test);
    }

    proptest! {
        #[test]
        fn split_is_deterministic_and_disjoint(n in 0usize..60, seed in any::<u64>(), frac in 0.0f64..1.0) {
            let s = fixture(n);
            let n_train = (n as f64 * frac) as usize;
            let n_test = (n - n_train) / 2;
            let a = split_corpus(&s, n_train, n_test, seed).unwrap();
            let b = split_corpus(&s, n_train, n_test, seed).unwrap();
            prop_assert_eq!(&a, &b);
            let train: std::collections::HashSet<usize> = a.train.iter().map(|s| s.line).collect();
            prop_assert!(a.test.iter().all(|s| !train.contains(&s.line)));
        }

        #[test]
        fn detokenize_tokenize_identity(words in proptest::collection::vec("[a-z']{1,8}", 0..20)) {
            let text = words.join(" ");
            prop_assert_eq!(detokenize(&tokenize(&text)), text);
        }
    }
}
