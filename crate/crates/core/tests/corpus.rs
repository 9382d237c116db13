use std::fs;

use semlink::corpus::{load_corpus, split_corpus, synth, tokenize, CorpusSplit, Vocab, MAX_WORDS, MIN_WORDS};
use semlink::huffman::{corpus_frequencies, HuffmanTable};
use semlink::Error;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/corpus50.txt");

#[test]
fn fixture_keeps_hand_counted_lines() {
    let loaded = load_corpus(FIXTURE, MIN_WORDS, MAX_WORDS).unwrap();
    assert_eq!(loaded.sentences.len(), 23);
    assert_eq!(loaded.dropped, 27);
    assert!(loaded.sentences.windows(2).all(|w| w[0].line < w[1].line));
    assert!(loaded
        .sentences
        .iter()
        .all(|s| (MIN_WORDS..=MAX_WORDS).contains(&s.tokens.len())));
    assert_eq!(loaded.sentences[0].tokens, tokenize("the debate is closed"));
}

#[test]
fn boundary_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.txt");
    let long = vec!["w"; 31].join(" ");
    fs::write(&p, format!("a b c\na b c d\n{long}\n")).unwrap();
    let loaded = load_corpus(&p, 4, 30).unwrap();
    assert_eq!(loaded.sentences.len(), 1);
    assert_eq!(loaded.sentences[0].tokens, vec!["a", "b", "c", "d"]);
    fs::write(&p, "a b\n").unwrap();
    assert!(matches!(load_corpus(&p, 4, 30), Err(Error::EmptyCorpus { dropped: 1 })));
    assert!(matches!(
        load_corpus(dir.path().join("missing"), 4, 30),
        Err(Error::Io { .. })
    ));
}

#[test]
fn manifests_reproduce_the_split() {
    let loaded = load_corpus(FIXTURE, MIN_WORDS, MAX_WORDS).unwrap();
    let split = split_corpus(&loaded.sentences, 15, 8, 7).unwrap();
    let train = CorpusSplit::from_manifest(&CorpusSplit::manifest(&split.train), &loaded.sentences).unwrap();
    assert_eq!(train, split.train);
    let again = split_corpus(&loaded.sentences, 15, 8, 7).unwrap();
    assert_eq!(again, split);
    assert!(split_corpus(&loaded.sentences, 20, 4, 7).is_err());
}

#[test]
fn synthetic_corpus_huffman_length_near_460_bits() {
    let text = synth::generate_corpus(6000, 11).join("\n");
    let loaded = semlink::corpus::parse_corpus(&text, MIN_WORDS, MAX_WORDS).unwrap();
    let split = split_corpus(&loaded.sentences, 5000, 500, 1).unwrap();
    let texts: Vec<String> = split.train.iter().map(|s| s.text()).collect();
    let table = HuffmanTable::build(&corpus_frequencies(&texts)).unwrap();
    let mut total = 0;
    for s in &split.test {
        let bits = table.encode(&s.text()).unwrap();
        let d = table.decode(&bits);
        assert!(d.is_clean());
        assert_eq!(d.text, s.text());
        total += bits.len();
    }
    let mean = total as f64 / split.test.len() as f64;
    assert!((368.0..=552.0).contains(&mean), "mean {mean} bits");
    let vocab = Vocab::build(&split.train, 20_000).unwrap();
    assert!(split
        .train
        .iter()
        .flat_map(|s| vocab.encode(&s.tokens))
        .all(|id| id != semlink::corpus::UNK));
}
