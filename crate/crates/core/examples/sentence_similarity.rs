//! Word-edit and embedding-cosine sentence similarity, and the acceptance
//! decision at a threshold.
//!
//! `cargo run --release --example sentence_similarity`

use std::collections::HashMap;

use anyhow::Result;
use semlink::corpus::tokenize;
use semlink::similarity::{accept, score, Embeddings, MetricKind};

fn main() -> Result<()> {
    let reference = tokenize("the committee adopted the report on fisheries today");
    let candidates = [
        "the committee adopted the report on fisheries today",
        "the committee adopted the report on fishing today",
        "the committee rejected the report on fisheries",
        "parliament will vote tomorrow",
    ];
    let mut vectors = HashMap::new();
    for (i, w) in ["committee", "report", "fisheries", "adopted", "rejected", "today"]
        .iter()
        .enumerate()
    {
        let angle = i as f64 * 0.4;
        vectors.insert(w.to_string(), vec![angle.cos(), angle.sin(), 0.5]);
    }
    // a near-synonym points almost the same way as "fisheries"
    vectors.insert("fishing".into(), vec![0.8f64.cos(), 0.8f64.sin(), 0.55]);
    let emb = Embeddings::new(vectors, Some(vec![0.0, 0.0, 1.0]))?;
    for c in candidates {
        let tokens = tokenize(c);
        let edit = score(MetricKind::WordEdit, &reference, &tokens, None)?;
        let cos = score(MetricKind::EmbeddingCosine, &reference, &tokens, Some(&emb))?;
        println!("{edit:.3} {cos:.3} accept(>0.98) {:<5} {c}", accept(edit, 0.98));
    }
    Ok(())
}
