//! Character-level canonical Huffman coding for the conventional pipeline.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Substitute for characters outside the alphabet.
pub const FALLBACK: char = '~';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Char(char),
    Eos,
}

impl Symbol {
    fn to_field(self) -> String {
        match self {
            Symbol::Char(c) => format!("U+{:04X}", c as u32),
            Symbol::Eos => "EOS".to_string(),
        }
    }

    fn from_field(s: &str) -> Result<Symbol> {
        if s == "EOS" {
            return Ok(Symbol::Eos);
        }
        s.strip_prefix("U+")
            .and_then(|h| u32::from_str_radix(h, 16).ok())
            .and_then(char::from_u32)
            .map(Symbol::Char)
            .ok_or_else(|| Error::Format(format!("bad symbol field '{s}'")))
    }
}

/// Lowercase letters, digits, space, apostrophe, the fallback and EOS.
pub fn alphabet() -> Vec<Symbol> {
    let mut chars: Vec<char> = ('a'..='z').chain('0'..='9').collect();
    chars.extend([' ', '\'', FALLBACK]);
    chars.sort_unstable();
    let mut out: Vec<Symbol> = chars.into_iter().map(Symbol::Char).collect();
    out.push(Symbol::Eos);
    out
}

/// Maps text onto the alphabet: lowercase, unknown characters become [`FALLBACK`].
pub fn normalize_text(text: &str) -> String {
    text.chars()
        .flat_map(char::to_lowercase)
        .map(|c| {
            if c.is_ascii_lowercase() || c.is_ascii_digit() || c == ' ' || c == '\'' {
                c
            } else {
                FALLBACK
            }
        })
        .collect()
}

/// Symbol counts over a text collection, one EOS per text, with add-one
/// smoothing over the full alphabet so every symbol gets a codeword.
pub fn corpus_frequencies<S: AsRef<str>>(texts: &[S]) -> BTreeMap<Symbol, u64> {
    let mut freq: BTreeMap<Symbol, u64> = alphabet().into_iter().map(|s| (s, 1)).collect();
    for t in texts {
        for c in normalize_text(t.as_ref()).chars() {
            *freq.entry(Symbol::Char(c)).or_default() += 1;
        }
        *freq.entry(Symbol::Eos).or_default() += 1;
    }
    freq
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuffmanTable {
    /// (symbol, code length) in canonical order: by length, then symbol.
    lengths: Vec<(Symbol, u32)>,
    codes: HashMap<Symbol, BitVector>,
    /// Decoding trie; children indices, leaves hold a symbol.
    trie: Vec<TrieNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
struct TrieNode {
    child: [Option<usize>; 2],
    leaf: Option<Symbol>,
}

#[derive(PartialEq, Eq)]
struct HeapItem {
    weight: u64,
    order: usize,
    node: usize,
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.weight, self.order).cmp(&(other.weight, other.order))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Huffman code lengths. Equal weights merge in symbol order, earliest first,
/// with merged nodes ordered after all leaves.
fn code_lengths(freq: &BTreeMap<Symbol, u64>) -> Vec<(Symbol, u32)> {
    let symbols: Vec<Symbol> = freq.iter().filter(|(_, &c)| c > 0).map(|(&s, _)| s).collect();
    if symbols.len() == 1 {
        return vec![(symbols[0], 1)];
    }
    let mut parent: Vec<usize> = vec![usize::MAX; symbols.len()];
    let mut heap: BinaryHeap<Reverse<HeapItem>> = symbols
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Reverse(HeapItem {
                weight: freq[s],
                order: i,
                node: i,
            })
        })
        .collect();
    let mut next = symbols.len();
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().unwrap();
        let Reverse(b) = heap.pop().unwrap();
        parent.push(usize::MAX);
        parent[a.node] = next;
        parent[b.node] = next;
        heap.push(Reverse(HeapItem {
            weight: a.weight + b.weight,
            order: next,
            node: next,
        }));
        next += 1;
    }
    symbols
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut depth = 0;
            let mut n = i;
            while parent[n] != usize::MAX {
                n = parent[n];
                depth += 1;
            }
            (s, depth)
        })
        .collect()
}

impl HuffmanTable {
    /// Builds the canonical code for the symbols with positive count.
    pub fn build(freq: &BTreeMap<Symbol, u64>) -> Result<HuffmanTable> {
        if !freq.values().any(|&c| c > 0) {
            return Err(Error::InvalidArgument(
                "frequency map has no symbol with positive count".into(),
            ));
        }
        Self::from_lengths(code_lengths(freq))
    }

    /// Reconstructs the canonical code from code lengths alone.
    pub fn from_lengths(mut lengths: Vec<(Symbol, u32)>) -> Result<HuffmanTable> {
        if lengths.is_empty() || lengths.iter().any(|&(_, l)| l == 0 || l > 63) {
            return Err(Error::InvalidArgument("invalid code lengths".into()));
        }
        let kraft: f64 = lengths.iter().map(|&(_, l)| 0.5f64.powi(l as i32)).sum();
        if kraft > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("Kraft sum {kraft} exceeds 1")));
        }
        lengths.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut codes = HashMap::new();
        let mut trie = vec![TrieNode::default()];
        let mut code: u64 = 0;
        let mut prev_len = lengths[0].1;
        for (i, &(sym, len)) in lengths.iter().enumerate() {
            if i > 0 {
                code = (code + 1) << (len - prev_len);
            }
            prev_len = len;
            let bits: BitVector = (0..len).rev().map(|k| (code >> k) & 1 == 1).collect();
            let mut node = 0;
            for b in bits.iter() {
                let slot = b as usize;
                node = match trie[node].child[slot] {
                    Some(n) => n,
                    None => {
                        trie.push(TrieNode::default());
                        let n = trie.len() - 1;
                        trie[node].child[slot] = Some(n);
                        n
                    }
                };
            }
            trie[node].leaf = Some(sym);
            codes.insert(sym, bits);
        }
        Ok(HuffmanTable { lengths, codes, trie })
    }

    pub fn lengths(&self) -> &[(Symbol, u32)] {
        &self.lengths
    }

    pub fn code(&self, sym: Symbol) -> Option<&BitVector> {
        self.codes.get(&sym)
    }

    pub fn kraft_sum(&self) -> f64 {
        self.lengths.iter().map(|&(_, l)| 0.5f64.powi(l as i32)).sum()
    }

    /// Concatenated codewords of `text` followed by the EOS codeword.
    pub fn encode(&self, text: &str) -> Result<BitVector> {
        let fallback = self.codes.get(&Symbol::Char(FALLBACK));
        let eos = self
            .codes
            .get(&Symbol::Eos)
            .ok_or_else(|| Error::InvalidArgument("table has no EOS symbol".into()))?;
        let mut out = BitVector::with_capacity(text.len() * 5);
        for c in text.chars() {
            let code = self
                .codes
                .get(&Symbol::Char(c))
                .or(fallback)
                .ok_or_else(|| Error::InvalidArgument(format!("character {c:?} not encodable")))?;
            out.extend_from(code);
        }
        out.extend_from(eos);
        Ok(out)
    }

    /// Walks the prefix tree until EOS. Never fails; malformed streams are flagged.
    pub fn decode(&self, bits: &BitVector) -> Decoded {
        let mut text = String::new();
        let mut node = 0;
        for (i, b) in bits.iter().enumerate() {
            match self.trie[node].child[b as usize] {
                Some(n) => node = n,
                None => {
                    return Decoded {
                        text,
                        truncated: true,
                        trailing: false,
                    }
                }
            }
            if let Some(sym) = self.trie[node].leaf {
                match sym {
                    Symbol::Eos => {
                        return Decoded {
                            text,
                            truncated: false,
                            trailing: i + 1 < bits.len(),
                        }
                    }
                    Symbol::Char(c) => text.push(c),
                }
                node = 0;
            }
        }
        Decoded {
            text,
            truncated: true,
            trailing: false,
        }
    }

    /// `U+XXXX<TAB>length` (or `EOS<TAB>length`) per line, canonical order.
    pub fn to_text(&self) -> String {
        self.lengths
            .iter()
            .map(|&(s, l)| format!("{}\t{}\n", s.to_field(), l))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<HuffmanTable> {
        let lengths = text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| {
                let (s, n) = l
                    .split_once('\t')
                    .ok_or_else(|| Error::Format(format!("bad table line '{l}'")))?;
                let n: u32 = n.parse().map_err(|_| Error::Format(format!("bad length in '{l}'")))?;
                Ok((Symbol::from_field(s)?, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_lengths(lengths)
    }
}

/// Output of [`HuffmanTable::decode`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub text: String,
    /// No EOS reached, or the stream ran into an unused code branch.
    pub truncated: bool,
    /// Bits remained after EOS.
    pub trailing: bool,
}

impl Decoded {
    pub fn is_clean(&self) -> bool {
        !self.truncated && !self.trailing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn freqs(pairs: &[(char, u64)]) -> BTreeMap<Symbol, u64> {
        pairs.iter().map(|&(c, n)| (Symbol::Char(c), n)).collect()
    }

    fn len_of(t: &HuffmanTable, c: char) -> u32 {
        t.code(Symbol::Char(c)).unwrap().len() as u32
    }

    #[test]
    fn three_symbol_lengths() {
        let t = HuffmanTable::build(&freqs(&[('a', 2), ('b', 1), ('c', 1)])).unwrap();
        assert_eq!((len_of(&t, 'a'), len_of(&t, 'b'), len_of(&t, 'c')), (1, 2, 2));
        assert_eq!(t.kraft_sum(), 1.0);
    }

    #[test]
    fn single_symbol_gets_one_bit() {
        let t = HuffmanTable::build(&freqs(&[('a', 5)])).unwrap();
        assert_eq!(len_of(&t, 'a'), 1);
        // the unused branch reads as a malformed stream
        let d = t.decode(&BitVector::parse("001"));
        assert_eq!(d.text, "aa");
        assert!(d.truncated);
    }

    #[test]
    fn empty_map_is_error() {
        assert!(HuffmanTable::build(&BTreeMap::new()).is_err());
        assert!(HuffmanTable::build(&freqs(&[('a', 0)])).is_err());
    }

    #[test]
    fn hand_decoded_stream() {
        // a:0, b:10, EOS:11 by canonical assignment (a len 1; b, EOS len 2)
        let mut f = freqs(&[('a', 4), ('b', 2)]);
        f.insert(Symbol::Eos, 1);
        let t = HuffmanTable::build(&f).unwrap();
        assert_eq!(t.code(Symbol::Char('a')).unwrap().to_string(), "0");
        assert_eq!(t.code(Symbol::Char('b')).unwrap().to_string(), "10");
        assert_eq!(t.code(Symbol::Eos).unwrap().to_string(), "11");
        let d = t.decode(&BitVector::parse("0 10 10 0 11"));
        assert_eq!(d.text, "abba");
        assert!(d.is_clean());
        let d = t.decode(&BitVector::parse("0 11 0"));
        assert_eq!(d.text, "a");
        assert!(d.trailing);
        let d = t.decode(&BitVector::parse("0 1"));
        assert!(d.truncated);
        assert!(t.encode("abc").unwrap_err().to_string().contains("not encodable"));
    }

    #[test]
    fn empty_text_is_just_eos() {
        let t = HuffmanTable::build(&corpus_frequencies(&["hello there"])).unwrap();
        assert_eq!(&t.encode("").unwrap(), t.code(Symbol::Eos).unwrap());
    }

    #[test]
    fn unknown_characters_use_fallback() {
        let t = HuffmanTable::build(&corpus_frequencies(&["abc"])).unwrap();
        let d = t.decode(&t.encode("a-b").unwrap());
        assert_eq!(d.text, "a~b");
        assert_eq!(normalize_text("Déjà-vu"), "d~j~~vu");
    }

    #[test]
    fn text_format_roundtrip() {
        let t = HuffmanTable::build(&corpus_frequencies(&["the quick brown fox"])).unwrap();
        let back = HuffmanTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn random_bits_never_panic() {
        let t = HuffmanTable::build(&corpus_frequencies(&["some english words here"])).unwrap();
        let mut s = 12345u64;
        for _ in 0..200 {
            let bits: BitVector = (0..460)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (s >> 63) == 1
                })
                .collect();
            let _ = t.decode(&bits);
        }
    }

    proptest! {
        #[test]
        fn lossless(text in "[a-z0-9 ']{0,80}") {
            let t = HuffmanTable::build(&corpus_frequencies(&["the council must act now"])).unwrap();
            let d = t.decode(&t.encode(&text).unwrap());
            prop_assert!(d.is_clean());
            prop_assert_eq!(d.text, text);
        }

        #[test]
        fn prefix_free_and_optimal(counts in proptest::collection::vec(1u64..1000, 2..30)) {
            let f: BTreeMap<Symbol, u64> = counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (Symbol::Char(char::from_u32(0x61 + i as u32).unwrap()), c))
                .collect();
            let t = HuffmanTable::build(&f).unwrap();
            let codes: Vec<String> = t.lengths().iter().map(|(s, _)| t.code(*s).unwrap().to_string()).collect();
            for (i, a) in codes.iter().enumerate() {
                for (j, b) in codes.iter().enumerate() {
                    prop_assert!(i == j || !b.starts_with(a.as_str()));
                }
            }
            prop_assert!((t.kraft_sum() - 1.0).abs() < 1e-12);
            let total: f64 = counts.iter().sum::<u64>() as f64;
            let entropy: f64 = counts.iter().map(|&c| { let p = c as f64 / total; -p * p.log2() }).sum();
            let avg: f64 = t.lengths().iter().map(|(s, l)| f[s] as f64 * *l as f64).sum::<f64>() / total;
            prop_assert!(avg >= entropy - 1e-9 && avg < entropy + 1.0);
        }
    }
}
