//! Sentence similarity scores in [0, 1] and the acceptance rule built on them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::codec::SemanticModel;
use crate::corpus::{Vocab, UNK};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    #[default]
    WordEdit,
    EmbeddingCosine,
}

impl MetricKind {
    /// Name written next to every reported similarity.
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::WordEdit => "sim_edit",
            MetricKind::EmbeddingCosine => "sim_embed",
        }
    }
}

/// `1 − lev(a, b) / max(|a|, |b|)` over words; 1 when both are empty.
pub fn sim_edit<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    let d = strsim::generic_levenshtein(
        &a.iter().map(AsRef::as_ref).collect::<Vec<&str>>(),
        &b.iter().map(AsRef::as_ref).collect::<Vec<&str>>(),
    );
    1.0 - d as f64 / longest as f64
}

/// Word vectors for [`sim_embed`]; unknown words use the `<unk>` vector.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Embeddings {
    vectors: HashMap<String, Vec<f64>>,
    unknown: Option<Vec<f64>>,
}

impl Embeddings {
    pub fn new(vectors: HashMap<String, Vec<f64>>, unknown: Option<Vec<f64>>) -> Result<Self> {
        let mut dims = vectors.values().chain(unknown.iter()).map(Vec::len);
        if let Some(d) = dims.next() {
            if dims.any(|x| x != d) {
                return Err(Error::Shape("embedding vectors of different lengths".into()));
            }
        }
        Ok(Embeddings { vectors, unknown })
    }

    /// The codec's input embedding table.
    pub fn from_codec(model: &SemanticModel, vocab: &Vocab) -> Self {
        let vectors = (0..vocab.len().min(model.config.vocab_size))
            .filter_map(|id| Some((vocab.token(id)?.to_string(), model.embedding_row(id)?)))
            .collect();
        Embeddings {
            vectors,
            unknown: model.embedding_row(UNK),
        }
    }

    fn lookup(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).or(self.unknown.as_ref()).map(Vec::as_slice)
    }

    fn mean<S: AsRef<str>>(&self, words: &[S]) -> Option<Vec<f64>> {
        let rows: Vec<&[f64]> = words.iter().filter_map(|w| self.lookup(w.as_ref())).collect();
        let first = rows.first()?;
        let mut acc = vec![0.0; first.len()];
        for r in &rows {
            acc.iter_mut().zip(*r).for_each(|(a, v)| *a += v);
        }
        acc.iter_mut().for_each(|a| *a /= rows.len() as f64);
        Some(acc)
    }
}

/// Cosine of mean word vectors mapped from [−1, 1] to [0, 1]. Falls back to
/// [`sim_edit`] when either mean vector has zero norm.
pub fn sim_embed<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T], embeddings: &Embeddings) -> f64 {
    let identical = a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.as_ref() == y.as_ref());
    if identical {
        return 1.0;
    }
    let (Some(u), Some(v)) = (embeddings.mean(a), embeddings.mean(b)) else {
        return sim_edit(a, b);
    };
    let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return sim_edit(a, b);
    }
    ((dot / (nu * nv)).clamp(-1.0, 1.0) + 1.0) / 2.0
}

/// Scores a pair under `kind`; embedding scores need `embeddings`.
pub fn score<S: AsRef<str>, T: AsRef<str>>(
    kind: MetricKind,
    a: &[S],
    b: &[T],
    embeddings: Option<&Embeddings>,
) -> Result<f64> {
    match (kind, embeddings) {
        (MetricKind::WordEdit, _) => Ok(sim_edit(a, b)),
        (MetricKind::EmbeddingCosine, Some(e)) => Ok(sim_embed(a, b, e)),
        (MetricKind::EmbeddingCosine, None) => Err(Error::InvalidArgument(
            "embedding similarity needs an embedding table".into(),
        )),
    }
}

/// Accepts strictly above the threshold.
pub fn accept(score: f64, threshold: f64) -> bool {
    score > threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    fn plane() -> Embeddings {
        let (c, s) = (60f64.to_radians().cos(), 60f64.to_radians().sin());
        Embeddings::new(
            HashMap::from([
                ("x".to_string(), vec![1.0, 0.0]),
                ("y".to_string(), vec![0.0, 1.0]),
                ("r".to_string(), vec![c, s]),
                ("o".to_string(), vec![0.0, 0.0]),
            ]),
            None,
        )
        .unwrap()
    }

    #[test]
    fn edit_examples() {
        let a = words("the house must vote on this report before the summer");
        let mut b = a.clone();
        b[4] = "in";
        assert_eq!(sim_edit(&a, &a), 1.0);
        assert_eq!(sim_edit(&a, &[] as &[&str]), 0.0);
        assert!((sim_edit(&a, &b) - 0.9).abs() < 1e-15);
        assert_eq!(sim_edit(&[] as &[&str], &[] as &[&str]), 1.0);
        assert!((sim_edit(&words("a b c"), &words("b c")) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn embed_examples() {
        let e = plane();
        assert_eq!(sim_embed(&["x"], &["x"], &e), 1.0);
        assert!((sim_embed(&["x"], &["y"], &e) - 0.5).abs() < 1e-15);
        assert!((sim_embed(&["x"], &["r"], &e) - 0.75).abs() < 1e-12);
        // mean of x, o, y is (1/3, 1/3), at 45° to x
        let expected = (0.5f64.sqrt() + 1.0) / 2.0;
        assert!((sim_embed(&["x"], &["x", "o", "y"], &e) - expected).abs() < 1e-12);
        // zero-norm mean falls back to the edit score
        assert_eq!(sim_embed(&["o"], &["x"], &e), 0.0);
        assert_eq!(sim_embed(&["q"], &["x"], &e), 0.0);
    }

    #[test]
    fn acceptance_is_strict() {
        assert!(accept(1.0, 0.98));
        assert!(!accept(0.98, 0.98));
        assert!(!accept(0.9, 0.98));
    }

    fn sentence() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(
            prop::sample::select(vec!["x", "y", "r", "o", "q", "z"]).prop_map(String::from),
            0..8,
        )
    }

    proptest! {
        #[test]
        fn metric_contract(a in sentence(), b in sentence()) {
            let e = plane();
            for s in [sim_edit(&a, &b), sim_embed(&a, &b, &e)] {
                prop_assert!((0.0..=1.0).contains(&s));
            }
            prop_assert_eq!(sim_edit(&a, &a), 1.0);
            prop_assert_eq!(sim_embed(&a, &a, &e), 1.0);
            prop_assert_eq!(sim_edit(&a, &b), sim_edit(&b, &a));
            prop_assert!((sim_embed(&a, &b, &e) - sim_embed(&b, &a, &e)).abs() < 1e-15);
        }

        #[test]
        fn acceptance_monotone_in_threshold(s in 0.0f64..=1.0, t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(accept(s, lo) || !accept(s, hi));
        }
    }
}
