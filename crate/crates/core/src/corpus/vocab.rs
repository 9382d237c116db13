use std::collections::HashMap;

use crate::error::{Error, Result};

use super::Sentence;

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const EOS: usize = 2;

const RESERVED: [&str; 3] = ["<pad>", "<unk>", "<eos>"];

/// Token/id bijection with training-split frequencies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocab {
    /// Keeps the `max_size - 3` most frequent tokens; equal counts are ordered
    /// lexicographically.
    pub fn build(train: &[Sentence], max_size: usize) -> Result<Vocab> {
        if max_size < 4 {
            return Err(Error::InvalidArgument(format!(
                "vocabulary size {max_size} leaves no room beside reserved ids"
            )));
        }
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for s in train {
            for t in &s.tokens {
                *freq.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, u64)> = freq.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(max_size - RESERVED.len());
        Ok(Self::from_entries(ranked.into_iter().map(|(t, c)| (t.to_string(), c))))
    }

    fn from_entries(entries: impl IntoIterator<Item = (String, u64)>) -> Vocab {
        let mut tokens: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        let mut counts = vec![0; RESERVED.len()];
        for (t, c) in entries {
            tokens.push(t);
            counts.push(c);
        }
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocab { tokens, counts, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Id for `token`, or [`UNK`].
    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK)
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(|s| s.as_str())
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().map(|t| self.id(t.as_ref())).collect()
    }

    pub fn decode(&self, ids: &[usize]) -> Vec<String> {
        ids.iter()
            .map(|&i| self.token(i).unwrap_or(RESERVED[UNK]).to_string())
            .collect()
    }

    /// One `token<TAB>count` line per id, reserved ids included.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, c) in self.tokens.iter().zip(&self.counts) {
            out.push_str(&format!("{t}\t{c}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Vocab> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let (t, c) = line
                .split_once('\t')
                .ok_or_else(|| Error::Format(format!("vocab line {i} has no tab")))?;
            let c: u64 = c
                .parse()
                .map_err(|_| Error::Format(format!("vocab line {i} has a bad count")))?;
            if i < RESERVED.len() {
                if t != RESERVED[i] {
                    return Err(Error::Format(format!("vocab line {i} must be {}", RESERVED[i])));
                }
            } else {
                entries.push((t.to_string(), c));
            }
        }
        Ok(Self::from_entries(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(words: &[&str]) -> Sentence {
        Sentence::new(0, &words.join(" "))
    }

    #[test]
    fn small_vocab() {
        let v = Vocab::build(&[sent(&["a", "a", "b"])], 5).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.token(PAD), Some("<pad>"));
        assert_eq!(v.token(UNK), Some("<unk>"));
        assert_eq!(v.token(EOS), Some("<eos>"));
        assert_eq!(v.id("a"), 3);
        assert_eq!(v.id("b"), 4);
        assert_eq!(v.id("zzz"), UNK);
    }

    #[test]
    fn ties_break_lexicographically() {
        let v = Vocab::build(&[sent(&["y", "x", "z", "z"])], 5).unwrap();
        assert_eq!(v.id("z"), 3);
        assert_eq!(v.id("x"), 4);
        assert_eq!(v.id("y"), UNK);
    }

    #[test]
    fn hand_ranked_fixture() {
        // counts by hand: the=4, council=2, must=2, act=1, now=1, we=1, agree=1
        let train = [
            sent(&["the", "council", "must", "act", "now"]),
            sent(&["we", "agree", "the", "the"]),
            sent(&["the", "council", "must"]),
        ];
        let v = Vocab::build(&train, 20).unwrap();
        let order: Vec<&str> = (3..v.len()).map(|i| v.token(i).unwrap()).collect();
        assert_eq!(order, ["the", "council", "must", "act", "agree", "now", "we"]);
        assert_eq!(v.count(v.id("the")), 4);
    }

    #[test]
    fn too_small_is_rejected() {
        assert!(Vocab::build(&[], 3).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let v = Vocab::build(&[sent(&["a", "b", "b", "c"])], 10).unwrap();
        assert_eq!(Vocab::from_text(&v.to_text()).unwrap(), v);
    }
}
