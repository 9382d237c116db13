use semlink::codec::{train_codec, CodecConfig, SemanticModel, TrainConfig};
use semlink::corpus::{parse_corpus, synth, Sentence, Vocab, MAX_WORDS, MIN_WORDS};
use semlink::nn::Checkpoint;

fn tiny() -> (Vec<Sentence>, Vocab) {
    let s = parse_corpus(&synth::generate_corpus(200, 4).join("\n"), MIN_WORDS, MAX_WORDS)
        .unwrap()
        .sentences;
    let vocab = Vocab::build(&s, 20_000).unwrap();
    (s, vocab)
}

fn clean_training(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 16,
        learning_rate: 3e-3,
        flip_range: (0.0, 0.0),
        keep_prob: 1.0,
        validation_fraction: 0.0,
        seed: 5,
    }
}

fn noiseless_exact(model: &SemanticModel, vocab: &Vocab, sentences: &[Sentence]) -> f64 {
    let hits = sentences
        .iter()
        .filter(|s| {
            let blocks = model.encode(&model.ids(s, vocab)).unwrap();
            model.decode(&blocks).unwrap().tokens(vocab) == s.tokens
        })
        .count();
    hits as f64 / sentences.len() as f64
}

#[test]
fn codec_memorizes_a_tiny_corpus() {
    let (s, vocab) = tiny();
    let config = CodecConfig::harq(vocab.len());
    let untrained = SemanticModel::new(config.clone(), 5).unwrap();
    let (model, log) = train_codec(&s, &vocab, config, &clean_training(60)).unwrap();
    let first = log.first().unwrap().train_loss;
    let best = log.iter().map(|e| e.train_loss).fold(f64::INFINITY, f64::min);
    assert!(best < 0.2 * first, "training loss {first} -> {best}");
    let before = noiseless_exact(&untrained, &vocab, &s);
    let after = noiseless_exact(&model, &vocab, &s);
    eprintln!("noiseless exact match {before:.3} -> {after:.3}");
    assert_eq!(before, 0.0);
    assert!(after > 0.5);
}

#[test]
fn training_is_reproducible_and_checkpoints_roundtrip() {
    let (s, vocab) = tiny();
    let config = CodecConfig::harq(vocab.len());
    let tc = TrainConfig {
        epochs: 2,
        ..TrainConfig::default()
    };
    let (a, log_a) = train_codec(&s, &vocab, config.clone(), &tc).unwrap();
    let (b, log_b) = train_codec(&s, &vocab, config, &tc).unwrap();
    assert_eq!(log_a, log_b);
    let (ca, cb) = (a.to_checkpoint().unwrap(), b.to_checkpoint().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let (pa, pb) = (dir.path().join("a.json"), dir.path().join("b.json"));
    ca.save(&pa).unwrap();
    cb.save(&pb).unwrap();
    assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    let back = SemanticModel::from_checkpoint(&Checkpoint::load(&pa).unwrap()).unwrap();
    for sentence in &s[..10] {
        let ids = a.ids(sentence, &vocab);
        let blocks = a.encode(&ids).unwrap();
        assert_eq!(back.encode(&ids).unwrap(), blocks);
        assert_eq!(back.decode(&blocks).unwrap().ids, a.decode(&blocks).unwrap().ids);
    }
}
