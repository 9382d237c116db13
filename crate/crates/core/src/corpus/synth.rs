//! Generator for parliamentary-register English sentences.
//!
//! Used as the default corpus when no Europarl-style text file is available.
//! Output is one sentence per line with ordinary capitalization and
//! punctuation; a small share of lines fall outside the 4..=30 word window so
//! the length filter has something to do.

use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

const OPENERS: &[&str] = &[
    "Mr President,",
    "Madam President,",
    "Ladies and gentlemen,",
    "First of all,",
    "In my opinion,",
    "On behalf of my group,",
    "Commissioner,",
    "In this context,",
    "Of course,",
    "Furthermore,",
    "Finally,",
    "However,",
];

const FRAMES: &[&str] = &[
    "I believe that",
    "we know that",
    "it is clear that",
    "I must say that",
    "it is essential that",
    "I am convinced that",
    "we all agree that",
    "it is important that",
    "I hope that",
    "my group considers that",
];

const SUBJECTS: &[&str] = &[
    "the Commission",
    "the Council",
    "the European Parliament",
    "this House",
    "the Member States",
    "our committee",
    "the rapporteur",
    "the presidency",
    "the European Union",
    "national governments",
    "the Court of Auditors",
    "the central bank",
    "the candidate countries",
    "the social partners",
    "local authorities",
    "the agency",
];

const MODALS: &[&str] = &[
    "must",
    "should",
    "will",
    "cannot",
    "has to",
    "would like to",
    "is going to",
    "ought to",
    "needs to",
    "is ready to",
];

const VERBS: &[&str] = &[
    "support",
    "reject",
    "examine",
    "strengthen",
    "improve",
    "review",
    "adopt",
    "welcome",
    "ensure",
    "protect",
    "promote",
    "address",
    "reform",
    "finance",
    "monitor",
    "simplify",
    "implement",
    "consider",
    "defend",
    "clarify",
    "present",
    "revise",
    "accept",
    "guarantee",
];

const ADJECTIVES: &[&str] = &[
    "new",
    "common",
    "social",
    "economic",
    "environmental",
    "fair",
    "effective",
    "transparent",
    "sustainable",
    "important",
    "financial",
    "legal",
    "regional",
    "external",
    "democratic",
    "internal",
    "clear",
    "strong",
    "balanced",
    "ambitious",
    "joint",
    "annual",
    "global",
    "proposed",
];

const NOUNS: &[&str] = &[
    "policy",
    "proposal",
    "report",
    "framework",
    "budget",
    "agreement",
    "directive",
    "regulation",
    "strategy",
    "programme",
    "market",
    "reform",
    "resolution",
    "initiative",
    "procedure",
    "system",
    "dialogue",
    "cooperation",
    "package",
    "legislation",
    "fund",
    "mechanism",
    "debate",
    "position",
];

const TOPICS: &[&str] = &[
    "for small businesses",
    "in the energy sector",
    "on climate change",
    "for young people",
    "in rural areas",
    "on human rights",
    "for consumers",
    "in the candidate countries",
    "on food safety",
    "for workers",
    "on public health",
    "in the fisheries sector",
    "on asylum and migration",
    "for research and innovation",
    "in the transport sector",
    "on the internal market",
    "for the regions",
    "on data protection",
    "in developing countries",
    "for farmers",
];

const ADVERBIALS: &[&str] = &[
    "as soon as possible",
    "in the coming years",
    "without further delay",
    "before the end of the year",
    "at the next summit",
    "in the long term",
    "at European level",
    "during this parliamentary term",
    "in close cooperation with the Council",
    "with the necessary resources",
];

const REASONS: &[&str] = &["because", "although", "since", "while", "but", "and"];

const GOALS: &[&str] = &[
    "a stronger Europe",
    "a more social Europe",
    "better regulation",
    "greater transparency",
    "sustainable growth",
    "more jobs",
    "a fairer society",
    "real progress",
];

const SHORT: &[&str] = &[
    "Thank you.",
    "Thank you very much, Mr President.",
    "I would like to thank the rapporteur.",
    "The debate is closed.",
    "The vote will take place tomorrow.",
    "That is not acceptable.",
    "We support this report.",
    "I voted in favour.",
    "Applause",
];

fn pick<'a>(rng: &mut Stream, list: &[&'a str]) -> &'a str {
    list.choose(rng).copied().unwrap_or("")
}

fn clause(rng: &mut Stream) -> String {
    let mut parts = vec![pick(rng, SUBJECTS), pick(rng, MODALS), pick(rng, VERBS), "the"];
    if rng.random_bool(0.7) {
        parts.push(pick(rng, ADJECTIVES));
    }
    parts.push(pick(rng, NOUNS));
    if rng.random_bool(0.7) {
        parts.push(pick(rng, TOPICS));
    }
    parts.join(" ")
}

fn sentence(rng: &mut Stream) -> String {
    let roll: f64 = rng.random();
    let mut body = if roll < 0.06 {
        return pick(rng, SHORT).to_string();
    } else if roll < 0.18 {
        format!(
            "Why does {} not {} the {} {} {}?",
            pick(rng, SUBJECTS),
            pick(rng, VERBS),
            pick(rng, ADJECTIVES),
            pick(rng, NOUNS),
            pick(rng, TOPICS)
        )
    } else if roll < 0.32 {
        format!(
            "The {} on the {} {} is an important step towards {}",
            pick(rng, NOUNS),
            pick(rng, ADJECTIVES),
            pick(rng, NOUNS),
            pick(rng, GOALS)
        )
    } else {
        let mut s = String::new();
        if rng.random_bool(0.5) {
            s.push_str(pick(rng, OPENERS));
            s.push(' ');
        }
        if rng.random_bool(0.45) {
            s.push_str(pick(rng, FRAMES));
            s.push(' ');
        }
        s.push_str(&clause(rng));
        if rng.random_bool(0.4) {
            s.push(' ');
            s.push_str(pick(rng, ADVERBIALS));
        }
        if rng.random_bool(0.35) {
            s.push_str(", ");
            s.push_str(pick(rng, REASONS));
            s.push(' ');
            s.push_str(&clause(rng));
        }
        s
    };
    if !body.ends_with('?') {
        body.push('.');
    }
    let mut chars = body.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => body,
    }
}

/// Generates `n` lines deterministically from `seed`.
pub fn generate_corpus(n: usize, seed: u64) -> Vec<String> {
    let mut rng = rng::stream(seed);
    (0..n).map(|_| sentence(&mut rng)).collect()
}

pub fn write_corpus(path: impl AsRef<Path>, n: usize, seed: u64) -> Result<()> {
    let path = path.as_ref();
    let mut text = generate_corpus(n, seed).join("\n");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, MAX_WORDS, MIN_WORDS};

    #[test]
    fn deterministic() {
        assert_eq!(generate_corpus(50, 4), generate_corpus(50, 4));
        assert_ne!(generate_corpus(50, 4), generate_corpus(50, 5));
    }

    #[test]
    fn mostly_in_bounds_with_some_rejects() {
        let text = generate_corpus(5000, 1).join("\n");
        let c = parse_corpus(&text, MIN_WORDS, MAX_WORDS).unwrap();
        assert!(c.dropped > 0);
        assert!(c.sentences.len() > 4500);
        let mean = c.sentences.iter().map(|s| s.tokens.len()).sum::<usize>() as f64 / c.sentences.len() as f64;
        assert!((12.0..24.0).contains(&mean), "mean words {mean}");
    }
}
