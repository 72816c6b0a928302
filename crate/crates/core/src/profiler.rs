//! Corpus profiling: imperative ratio, type-token ratio, sentence complexity,
//! sentiment spread and the detachment index, computed over one shared
//! token/sentence inventory.
//!
//! Only sentences that hold at least one Word or Number token are counted.
//! The segmenter folds stray punctuation into neighbouring sentences, so
//! this only drops documents made entirely of punctuation.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{PolarityLexicon, PronounSets, VerbLexicon};
use crate::rng::SeededRng;
use crate::text::{Document, Sentence, Token, TokenKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("corpus has no countable sentences or word tokens")]
    EmptyCorpus,
    #[error("sentiment spread needs at least 2 sentences, found {found}")]
    TooFewSentences { found: u64 },
}

/// Words skipped before the imperative head ("Please close", "Now run").
pub const LEADING_SKIP: &[&str] = &[
    "please", "kindly", "just", "simply", "first", "then", "next", "now", "finally", "also",
    "always", "never", "carefully", "quickly", "again", "so",
];

/// Finite forms that, right after the candidate head, mark it as a noun
/// subject ("Work is hard", "Set theory was...").
pub const FINITE_AFTER_SUBJECT: &[&str] = &[
    "is", "are", "was", "were", "has", "had", "does", "did", "will", "would", "can", "could",
    "should", "may", "might", "must", "shall", "seems", "seem", "remains", "becomes",
];

/// Subject pronouns and determiners that open a nominal subject.
pub const SUBJECT_OPENERS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "this", "that", "these", "those", "the", "a",
    "an", "my", "your", "his", "her", "its", "our", "their", "there", "someone", "everyone",
    "nobody", "somebody", "everybody", "each", "every", "some", "any", "all",
];

/// Decides whether a sentence issues a command. Swappable so a tagger-backed
/// detector can replace the rule-based one.
pub trait ImperativeDetector: Send + Sync {
    fn is_imperative(&self, sentence: &[Token]) -> bool;
}

/// Lexicon-verb-initial sentence with no subject in front of the verb.
#[derive(Debug, Clone)]
pub struct RuleImperativeDetector {
    verbs: VerbLexicon,
}

impl RuleImperativeDetector {
    pub fn new(verbs: VerbLexicon) -> Self {
        RuleImperativeDetector { verbs }
    }
}

impl ImperativeDetector for RuleImperativeDetector {
    fn is_imperative(&self, sentence: &[Token]) -> bool {
        let mut words = sentence.iter().filter(|t| t.kind == TokenKind::Word).map(|t| t.lower.as_str());
        let head = loop {
            match words.next() {
                Some(w) if LEADING_SKIP.contains(&w) => continue,
                Some(w) => break w,
                None => return false,
            }
        };
        if SUBJECT_OPENERS.contains(&head) || !self.verbs.contains(head) {
            return false;
        }
        !words.next().is_some_and(|w| FINITE_AFTER_SUBJECT.contains(&w))
    }
}

/// Population moments, mergeable in any grouping (Chan et al. update).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }

    pub fn population_std(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.m2.max(0.0) / self.n as f64).sqrt()
    }
}

/// Additive per-corpus tallies. `merge` is associative and commutative on
/// every integer field and on the type set.
#[derive(Debug, Clone, Default)]
pub struct CorpusCounts {
    pub sentences: u64,
    pub imperatives: u64,
    pub word_tokens: u64,
    pub lexical_tokens: u64,
    pub personal: u64,
    pub impersonal: u64,
    pub types: HashSet<String>,
    pub polarity: Moments,
}

impl CorpusCounts {
    pub fn merge(mut self, other: CorpusCounts) -> CorpusCounts {
        self.sentences += other.sentences;
        self.imperatives += other.imperatives;
        self.word_tokens += other.word_tokens;
        self.lexical_tokens += other.lexical_tokens;
        self.personal += other.personal;
        self.impersonal += other.impersonal;
        let mut other_types = other.types;
        if self.types.len() < other_types.len() {
            std::mem::swap(&mut self.types, &mut other_types);
        }
        self.types.extend(other_types);
        self.polarity = self.polarity.merge(other.polarity);
        self
    }

    pub fn imperative_ratio(&self) -> Result<f64, ProfileError> {
        self.need_sentences()?;
        Ok(self.imperatives as f64 / self.sentences as f64)
    }

    pub fn type_token_ratio(&self) -> Result<f64, ProfileError> {
        self.need_words()?;
        Ok(self.types.len() as f64 / self.word_tokens as f64)
    }

    pub fn sentence_complexity(&self) -> Result<f64, ProfileError> {
        self.need_sentences()?;
        Ok(self.lexical_tokens as f64 / self.sentences as f64)
    }

    pub fn sentiment_variance(&self) -> Result<f64, ProfileError> {
        self.need_sentences()?;
        if self.sentences < 2 {
            return Err(ProfileError::TooFewSentences { found: self.sentences });
        }
        Ok(self.polarity.population_std())
    }

    pub fn detachment_index(&self) -> Result<f64, ProfileError> {
        self.need_words()?;
        Ok((self.impersonal as f64 - self.personal as f64) / self.word_tokens as f64)
    }

    fn need_sentences(&self) -> Result<(), ProfileError> {
        if self.sentences == 0 {
            Err(ProfileError::EmptyCorpus)
        } else {
            Ok(())
        }
    }

    fn need_words(&self) -> Result<(), ProfileError> {
        if self.word_tokens == 0 {
            Err(ProfileError::EmptyCorpus)
        } else {
            Ok(())
        }
    }
}

/// One row of linguistic signals for a corpus sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusProfile {
    pub imperative_ratio: f64,
    pub ttr: f64,
    pub avg_sentence_len: f64,
    pub sentiment_variance: f64,
    pub detachment: f64,
    /// Word + Number tokens (the sentence-length numerator).
    pub n_tokens: u64,
    /// Word tokens (the TTR and detachment denominator).
    pub n_word_tokens: u64,
    pub n_sentences: u64,
}

pub const TSV_HEADER: &str = "Imperative\tTTR\tComplexity\tSentiment\tDetachment";

impl CorpusProfile {
    pub fn from_counts(counts: &CorpusCounts) -> Result<Self, ProfileError> {
        Ok(CorpusProfile {
            imperative_ratio: counts.imperative_ratio()?,
            ttr: counts.type_token_ratio()?,
            avg_sentence_len: counts.sentence_complexity()?,
            sentiment_variance: counts.sentiment_variance()?,
            detachment: counts.detachment_index()?,
            n_tokens: counts.lexical_tokens,
            n_word_tokens: counts.word_tokens,
            n_sentences: counts.sentences,
        })
    }

    /// Header line plus one record in the column order
    /// Imperative, TTR, Complexity, Sentiment, Detachment.
    pub fn to_tsv(&self) -> String {
        format!(
            "{TSV_HEADER}\n{}\t{}\t{}\t{}\t{}\n",
            self.imperative_ratio, self.ttr, self.avg_sentence_len, self.sentiment_variance, self.detachment
        )
    }
}

/// Bundles the resources needed for a profile.
pub struct Profiler {
    detector: Box<dyn ImperativeDetector>,
    polarity: PolarityLexicon,
    pronouns: PronounSets,
}

impl Default for Profiler {
    fn default() -> Self {
        Profiler::new(VerbLexicon::default(), PolarityLexicon::default(), PronounSets::default())
    }
}

/// Documents per map task. Fixed so merge order never depends on the host.
const BLOCK: usize = 64;

impl Profiler {
    pub fn new(verbs: VerbLexicon, polarity: PolarityLexicon, pronouns: PronounSets) -> Self {
        Profiler {
            detector: Box::new(RuleImperativeDetector::new(verbs)),
            polarity,
            pronouns,
        }
    }

    pub fn with_detector(mut self, detector: Box<dyn ImperativeDetector>) -> Self {
        self.detector = detector;
        self
    }

    pub fn polarity(&self) -> &PolarityLexicon {
        &self.polarity
    }

    pub fn pronouns(&self) -> &PronounSets {
        &self.pronouns
    }

    pub fn count_document(&self, doc: &Document) -> CorpusCounts {
        let mut counts = CorpusCounts::default();
        for sentence in &doc.sentences {
            let tokens = sentence.tokens(doc);
            if !tokens.iter().any(Token::is_lexical) {
                continue;
            }
            counts.sentences += 1;
            if self.detector.is_imperative(tokens) {
                counts.imperatives += 1;
            }
            counts.polarity.push(polarity_of(tokens, &self.polarity));
            for tok in tokens {
                match tok.kind {
                    TokenKind::Word => {
                        counts.word_tokens += 1;
                        counts.lexical_tokens += 1;
                        if self.pronouns.is_personal(&tok.lower) {
                            counts.personal += 1;
                        } else if self.pronouns.is_impersonal(&tok.lower) {
                            counts.impersonal += 1;
                        }
                        if !counts.types.contains(&tok.lower) {
                            counts.types.insert(tok.lower.clone());
                        }
                    }
                    TokenKind::Number => counts.lexical_tokens += 1,
                    TokenKind::Punct => {}
                }
            }
        }
        counts
    }

    /// Map over fixed-size document blocks on scoped threads, then merge the
    /// block tallies in block order.
    pub fn count(&self, docs: &[Document]) -> CorpusCounts {
        let count_block = |block: &[Document]| {
            block
                .iter()
                .map(|d| self.count_document(d))
                .fold(CorpusCounts::default(), CorpusCounts::merge)
        };
        if docs.len() <= BLOCK {
            return count_block(docs);
        }
        let blocks: Vec<&[Document]> = docs.chunks(BLOCK).collect();
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(blocks.len());
        let per_worker = blocks.len().div_ceil(workers);
        let partials: Vec<Vec<CorpusCounts>> = std::thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .chunks(per_worker)
                .map(|group| scope.spawn(move || group.iter().map(|b| count_block(b)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().map(|h| h.join().expect("profiler worker panicked")).collect()
        });
        partials
            .into_iter()
            .flatten()
            .fold(CorpusCounts::default(), CorpusCounts::merge)
    }

    pub fn profile(&self, docs: &[Document]) -> Result<CorpusProfile, ProfileError> {
        CorpusProfile::from_counts(&self.count(docs))
    }
}

fn polarity_of(tokens: &[Token], lex: &PolarityLexicon) -> f64 {
    let mut sum = 0.0;
    let mut hits = 0usize;
    let mut flip_through: Option<usize> = None;
    for (pos, word) in tokens.iter().filter(|t| t.kind == TokenKind::Word).enumerate() {
        if lex.is_negation(&word.lower) {
            flip_through = Some(pos + lex.window());
            continue;
        }
        if let Some(p) = lex.polarity(&word.lower) {
            let negated = flip_through.is_some_and(|end| pos <= end);
            sum += if negated { -p } else { p };
            hits += 1;
        }
    }
    if hits == 0 {
        0.0
    } else {
        sum / hits as f64
    }
}

/// Mean polarity of the sentence's lexicon words, sign-flipped inside the
/// negation window; 0.0 when nothing matches.
pub fn sentence_polarity(doc: &Document, sentence: &Sentence, lex: &PolarityLexicon) -> f64 {
    polarity_of(sentence.tokens(doc), lex)
}

fn with_profiler<T>(
    verbs: Option<&VerbLexicon>,
    lex: Option<&PolarityLexicon>,
    pron: Option<&PronounSets>,
    docs: &[Document],
    f: impl FnOnce(&CorpusCounts) -> Result<T, ProfileError>,
) -> Result<T, ProfileError> {
    let profiler = Profiler::new(
        verbs.cloned().unwrap_or_default(),
        lex.cloned().unwrap_or_default(),
        pron.cloned().unwrap_or_default(),
    );
    f(&profiler.count(docs))
}

pub fn imperative_ratio(docs: &[Document], verbs: &VerbLexicon) -> Result<f64, ProfileError> {
    with_profiler(Some(verbs), None, None, docs, CorpusCounts::imperative_ratio)
}

pub fn type_token_ratio(docs: &[Document]) -> Result<f64, ProfileError> {
    with_profiler(None, None, None, docs, CorpusCounts::type_token_ratio)
}

pub fn sentence_complexity(docs: &[Document]) -> Result<f64, ProfileError> {
    with_profiler(None, None, None, docs, CorpusCounts::sentence_complexity)
}

pub fn sentiment_variance(docs: &[Document], lex: &PolarityLexicon) -> Result<f64, ProfileError> {
    with_profiler(None, Some(lex), None, docs, CorpusCounts::sentiment_variance)
}

pub fn detachment_index(docs: &[Document], pron: &PronounSets) -> Result<f64, ProfileError> {
    with_profiler(None, None, Some(pron), docs, CorpusCounts::detachment_index)
}

pub fn profile(
    docs: &[Document],
    verbs: &VerbLexicon,
    lex: &PolarityLexicon,
    pron: &PronounSets,
) -> Result<CorpusProfile, ProfileError> {
    Profiler::new(verbs.clone(), lex.clone(), pron.clone()).profile(docs)
}

/// Seeded document shuffle, then whole documents in shuffled order until
/// their Word+Number token total reaches `cap`. `cap == 0` keeps everything.
pub fn sample_documents(mut docs: Vec<Document>, cap: u64, seed: u64) -> Vec<Document> {
    SeededRng::new(seed).shuffle(&mut docs);
    if cap == 0 {
        return docs;
    }
    let mut total = 0u64;
    let mut keep = 0;
    for doc in &docs {
        if total >= cap {
            break;
        }
        total += doc.tokens.iter().filter(|t| t.is_lexical()).count() as u64;
        keep += 1;
    }
    docs.truncate(keep);
    docs
}
