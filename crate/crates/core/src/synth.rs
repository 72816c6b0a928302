//! Synthetic corpora whose linguistic signals are known by construction.
//!
//! Sentences are assembled from closed template pools: imperative heads are
//! verbs from the verb lexicon, declaratives open with "The". Polarity words
//! realize each sentence's target score, pronoun slots realize the
//! detachment target, and nonce filler words tune the type-token ratio.
//! Template and filler vocabulary never collide with the lexicons, so the
//! expected profile is exact rather than approximate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{PolarityLexicon, PronounSets, VerbLexicon};
use crate::profiler::{CorpusProfile, FINITE_AFTER_SUBJECT, LEADING_SKIP, SUBJECT_OPENERS};
use crate::rng::SeededRng;
use crate::text::DEFAULT_ABBREVIATIONS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("unrepresentable target: {0}")]
    UnrepresentableTarget(String),
}

fn unrepresentable(msg: impl Into<String>) -> SynthError {
    SynthError::UnrepresentableTarget(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileTarget {
    pub imperative_ratio: f64,
    pub detachment: f64,
    /// One target polarity per sentence.
    pub polarities: Vec<f64>,
    #[serde(default = "full_band")]
    pub ttr_band: (f64, f64),
    pub n_sentences: usize,
    #[serde(default)]
    pub seed: u64,
}

fn full_band() -> (f64, f64) {
    (0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Synthesized {
    pub text: String,
    pub expected: CorpusProfile,
    /// Realized per-sentence polarities, in sentence order.
    pub polarities: Vec<f64>,
}

const SYLLABLES_C: &[u8] = b"bdfgklmnprstvz";
const SYLLABLES_V: &[u8] = b"aeiou";

/// The `i`-th nonce word: at least three consonant-vowel syllables, distinct
/// for every `i`.
pub fn nonce_word(i: usize) -> String {
    let base = SYLLABLES_C.len() * SYLLABLES_V.len();
    let mut n = i;
    let mut out = Vec::new();
    let mut syllables = 0;
    while n > 0 || syllables < 3 {
        let s = n % base;
        out.push(SYLLABLES_C[s / SYLLABLES_V.len()]);
        out.push(SYLLABLES_V[s % SYLLABLES_V.len()]);
        n /= base;
        syllables += 1;
    }
    String::from_utf8(out).expect("ascii")
}

const NOUNS: &[&str] = &[
    "ledger", "valve", "harbor", "lantern", "orchard", "sensor", "bridge", "archive", "kettle",
    "compass", "quarry", "meadow", "circuit", "folio", "granary", "anvil", "beacon", "cellar",
];

const DECLARATIVE_VERBS: &[&str] = &[
    "rested", "waited", "hummed", "stood", "shifted", "glowed", "settled", "drifted",
];

struct Vocabulary<'a> {
    heads: Vec<&'a str>,
    nouns: Vec<&'static str>,
    past: Vec<&'static str>,
    negator: Option<&'a str>,
    reserved: BTreeSet<String>,
}

impl<'a> Vocabulary<'a> {
    fn new(verbs: &'a VerbLexicon, lex: &'a PolarityLexicon, pron: &'a PronounSets) -> Self {
        let mut reserved: BTreeSet<String> = verbs.iter().map(str::to_string).collect();
        reserved.extend(lex.entries().map(|(w, _)| w.to_string()));
        reserved.extend(lex.negations().map(str::to_string));
        reserved.extend(pron.personal().map(str::to_string));
        reserved.extend(pron.impersonal().map(str::to_string));
        for list in [LEADING_SKIP, FINITE_AFTER_SUBJECT, SUBJECT_OPENERS] {
            reserved.extend(list.iter().map(|w| w.to_string()));
        }
        reserved.extend(
            DEFAULT_ABBREVIATIONS
                .lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| l.trim().trim_end_matches('.').to_string()),
        );
        let shared = |w: &str| lex.polarity(w).is_some() || lex.is_negation(w) || pron.is_personal(w) || pron.is_impersonal(w);
        let heads = verbs
            .iter()
            .filter(|v| v.chars().all(|c| c.is_ascii_alphabetic()))
            .filter(|v| !shared(v) && !LEADING_SKIP.contains(v) && !SUBJECT_OPENERS.contains(v))
            .collect();
        let nouns = NOUNS.iter().copied().filter(|w| !reserved.contains(*w)).collect();
        let past = DECLARATIVE_VERBS.iter().copied().filter(|w| !reserved.contains(*w)).collect();
        let negator = lex
            .negations()
            .filter(|n| n.chars().all(|c| c.is_ascii_alphabetic()))
            .find(|n| !pron.is_personal(n) && !pron.is_impersonal(n) && !verbs.contains(n));
        reserved.extend(NOUNS.iter().map(|w| w.to_string()));
        reserved.extend(DECLARATIVE_VERBS.iter().map(|w| w.to_string()));
        reserved.insert("the".into());
        Vocabulary {
            heads,
            nouns,
            past,
            negator,
            reserved,
        }
    }

    fn fillers(&self, count: usize) -> Vec<String> {
        (0..)
            .map(nonce_word)
            .filter(|w| !self.reserved.contains(w))
            .take(count)
            .collect()
    }
}

/// Words realizing one sentence polarity, and the value the profiler will
/// compute for them.
fn realize_polarity(
    target: f64,
    lex: &PolarityLexicon,
    negator: Option<&str>,
) -> Option<(Vec<String>, f64)> {
    if target == 0.0 {
        return Some((Vec::new(), 0.0));
    }
    let entries: Vec<(&str, f64)> = lex
        .entries()
        .filter(|(w, _)| w.chars().all(|c| c.is_alphabetic()))
        .collect();
    if let Some((w, v)) = entries.iter().find(|(_, v)| *v == target) {
        return Some((vec![w.to_string()], *v));
    }
    if let Some(neg) = negator {
        if let Some((w, v)) = entries.iter().find(|(_, v)| -*v == target) {
            return Some((vec![neg.to_string(), w.to_string()], -*v));
        }
    }
    for (i, &(a, va)) in entries.iter().enumerate() {
        for &(b, vb) in &entries[i + 1..] {
            let mean = (va + vb) / 2.0;
            if mean == target {
                return Some((vec![a.to_string(), b.to_string()], mean));
            }
        }
    }
    None
}

fn population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn generate_default(target: &ProfileTarget) -> Result<Synthesized, SynthError> {
    generate(
        target,
        &VerbLexicon::default(),
        &PolarityLexicon::default(),
        &PronounSets::default(),
    )
}

pub fn generate(
    target: &ProfileTarget,
    verbs: &VerbLexicon,
    lex: &PolarityLexicon,
    pron: &PronounSets,
) -> Result<Synthesized, SynthError> {
    let n = target.n_sentences;
    if n < 2 {
        return Err(unrepresentable("need at least 2 sentences"));
    }
    if target.polarities.len() != n {
        return Err(unrepresentable(format!(
            "{} polarities for {n} sentences",
            target.polarities.len()
        )));
    }
    if !(0.0..=1.0).contains(&target.imperative_ratio) || !(-1.0..=1.0).contains(&target.detachment) {
        return Err(unrepresentable("ratio targets out of range"));
    }
    let (lo, hi) = target.ttr_band;
    if !(lo <= hi && hi > 0.0 && lo <= 1.0) {
        return Err(unrepresentable("empty TTR band"));
    }
    let imperatives = (target.imperative_ratio * n as f64).round() as usize;
    if imperatives as f64 / n as f64 != target.imperative_ratio {
        return Err(unrepresentable(format!(
            "imperative ratio {} is not a multiple of 1/{n}",
            target.imperative_ratio
        )));
    }

    let vocab = Vocabulary::new(verbs, lex, pron);
    if vocab.heads.is_empty() || vocab.nouns.is_empty() || vocab.past.is_empty() {
        return Err(unrepresentable("template pools are empty after removing lexicon collisions"));
    }
    let mut rng = SeededRng::new(target.seed);

    let mut kinds: Vec<bool> = (0..n).map(|i| i < imperatives).collect();
    rng.shuffle(&mut kinds);

    // Fixed part of every sentence: head words, then polarity words.
    let mut sentences: Vec<Vec<String>> = Vec::with_capacity(n);
    let mut realized = Vec::with_capacity(n);
    for (&imperative, &p) in kinds.iter().zip(&target.polarities) {
        let noun = rng.choose(&vocab.nouns).to_string();
        let mut words = if imperative {
            vec![rng.choose(&vocab.heads).to_string(), "the".into(), noun]
        } else {
            vec!["the".into(), noun, rng.choose(&vocab.past).to_string()]
        };
        let (polar, value) = realize_polarity(p, lex, vocab.negator)
            .ok_or_else(|| unrepresentable(format!("polarity {p} cannot be realized")))?;
        words.extend(polar);
        sentences.push(words);
        realized.push(value);
    }
    let base: usize = sentences.iter().map(Vec::len).sum();
    let fixed_types: BTreeSet<String> = sentences.iter().flatten().cloned().collect();

    let personal: Vec<&str> = pron.personal().collect();
    let impersonal: Vec<&str> = pron.impersonal().collect();
    if impersonal.is_empty() && target.detachment > 0.0 {
        return Err(unrepresentable("no impersonal pronouns configured"));
    }
    // Balanced pronoun pairs keep both classes present without moving the index.
    let pairs = if impersonal.is_empty() { 0 } else { rng.below(n as u64 + 1) as usize };

    let limit = base + 2 * pairs + 20 * n + 2000;
    let mut solution = None;
    for total in (base + 2 * pairs).max(1)..=limit {
        let excess = (target.detachment * total as f64).round() as i64;
        if excess as f64 / total as f64 != target.detachment {
            continue;
        }
        let pronouns = 2 * pairs + excess.unsigned_abs() as usize;
        let Some(fillers) = total.checked_sub(base + pronouns) else {
            continue;
        };
        let n_imp = pairs + excess.max(0) as usize;
        let n_pers = pairs + (-excess).max(0) as usize;
        let pron_types = n_imp.min(impersonal.len()) + n_pers.min(personal.len());
        let fixed = fixed_types.len() + pron_types;
        let ttr = |u: usize| (fixed + u) as f64 / total as f64;
        let mut unique = if fillers == 0 { 0 } else { 1 };
        if fillers > 0 {
            let guess = (lo * total as f64).floor() as usize;
            unique = unique.max(guess.saturating_sub(fixed).min(fillers));
            while unique < fillers && ttr(unique) < lo {
                unique += 1;
            }
        }
        if ttr(unique) >= lo && ttr(unique) <= hi {
            solution = Some((total, n_imp, n_pers, fillers, unique));
            break;
        }
    }
    let (total, n_imp, n_pers, fillers, unique) = solution.ok_or_else(|| {
        unrepresentable(format!(
            "no corpus size up to {limit} words realizes detachment {} inside TTR band {:?}",
            target.detachment, target.ttr_band
        ))
    })?;

    let mut slots: Vec<String> = Vec::with_capacity(n_imp + n_pers + fillers);
    slots.extend((0..n_imp).map(|i| impersonal[i % impersonal.len()].to_string()));
    slots.extend((0..n_pers).map(|i| personal[i % personal.len()].to_string()));
    let filler_words = vocab.fillers(unique);
    slots.extend((0..fillers).map(|i| filler_words[i % unique].clone()));
    rng.shuffle(&mut slots);
    for (i, word) in slots.into_iter().enumerate() {
        sentences[i % n].push(word);
    }

    let types: BTreeSet<&str> = sentences.iter().flatten().map(String::as_str).collect();
    let ttr = types.len() as f64 / total as f64;
    if ttr < lo || ttr > hi {
        return Err(unrepresentable(format!("realized TTR {ttr} falls outside {:?}", target.ttr_band)));
    }

    let mut text = String::new();
    for (i, words) in sentences.iter().enumerate() {
        if i > 0 {
            text.push_str(if i % 10 == 0 { "\n\n" } else { " " });
        }
        text.push_str(&capitalize(&words[0]));
        for w in &words[1..] {
            text.push(' ');
            text.push_str(w);
        }
        text.push('.');
    }
    text.push('\n');

    let excess = n_imp as f64 - n_pers as f64;
    let expected = CorpusProfile {
        imperative_ratio: imperatives as f64 / n as f64,
        ttr,
        avg_sentence_len: total as f64 / n as f64,
        sentiment_variance: population_std(&realized),
        detachment: excess / total as f64,
        n_tokens: total as u64,
        n_word_tokens: total as u64,
        n_sentences: n as u64,
    };
    Ok(Synthesized {
        text,
        expected,
        polarities: realized,
    })
}

/// `n_tokens` words split into ten-word sentences, holding exactly
/// `n_impersonal` third-person and `n_personal` first/second-person pronouns.
pub fn pronoun_fixture(n_tokens: usize, n_impersonal: usize, n_personal: usize, seed: u64) -> String {
    assert!(n_impersonal + n_personal <= n_tokens, "more pronouns than tokens");
    let pron = PronounSets::default();
    let personal: Vec<&str> = pron.personal().collect();
    let impersonal: Vec<&str> = pron.impersonal().collect();
    let vocab_verbs = VerbLexicon::default();
    let vocab_lex = PolarityLexicon::default();
    let vocab = Vocabulary::new(&vocab_verbs, &vocab_lex, &pron);
    let fillers = vocab.fillers(50);
    let mut words: Vec<String> = Vec::with_capacity(n_tokens);
    words.extend((0..n_impersonal).map(|i| impersonal[i % impersonal.len()].to_string()));
    words.extend((0..n_personal).map(|i| personal[i % personal.len()].to_string()));
    let rest = n_tokens - words.len();
    words.extend((0..rest).map(|i| fillers[i % fillers.len()].clone()));
    SeededRng::new(seed).shuffle(&mut words);
    sentences_of(&words, 10)
}

/// `n_types` distinct nonce words cycled over `n_tokens` positions.
pub fn cycled_vocabulary(n_types: usize, n_tokens: usize) -> String {
    let words: Vec<String> = (0..n_tokens).map(|i| nonce_word(i % n_types)).collect();
    sentences_of(&words, 10)
}

fn sentences_of(words: &[String], per_sentence: usize) -> String {
    words
        .chunks(per_sentence)
        .map(|c| c.join(" ") + ".")
        .collect::<Vec<_>>()
        .join(" ")
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::profiler::Profiler;
    use crate::text::{Abbreviations, Document};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn profiler_recovers_targets(
            k in 0usize..=10,
            m in -50i32..=50,
            tenths in prop::collection::vec(-10i32..=10, 10),
            seed: u64,
        ) {
            let target = ProfileTarget {
                imperative_ratio: k as f64 / 10.0,
                detachment: f64::from(m) / 100.0,
                polarities: tenths.iter().map(|&t| f64::from(t) / 10.0).collect(),
                ttr_band: (0.0, 1.0),
                n_sentences: 10,
                seed,
            };
            let out = generate_default(&target).unwrap();
            let doc = Document::parse(out.text.as_str(), &Abbreviations::default());
            let got = Profiler::default().profile(&[doc]).unwrap();
            prop_assert_eq!(got.imperative_ratio, target.imperative_ratio);
            prop_assert_eq!(got.detachment, target.detachment);
            prop_assert!((got.sentiment_variance - out.expected.sentiment_variance).abs() < 1e-9);
            prop_assert_eq!(got.ttr, out.expected.ttr);
            prop_assert_eq!(generate_default(&target).unwrap().text, out.text);
        }
    }
}
