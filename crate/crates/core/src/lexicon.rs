//! Word lists behind the corpus profiler: base-form verbs, polarity scores,
//! negators and pronoun classes. Every list has a shipped default under
//! `resources/` and can be replaced from a file.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::digest::sha256_hex;

pub const DEFAULT_VERBS: &str = include_str!("../resources/verbs.txt");
pub const DEFAULT_POLARITY: &str = include_str!("../resources/polarity.tsv");
pub const DEFAULT_NEGATIONS: &str = include_str!("../resources/negations.txt");
pub const DEFAULT_PERSONAL: &str = include_str!("../resources/personal.txt");
pub const DEFAULT_IMPERSONAL: &str = include_str!("../resources/impersonal.txt");

/// Personal pronouns every [`PronounSets`] must contain.
pub const REQUIRED_PERSONAL: [&str; 7] = ["i", "me", "my", "we", "us", "our", "you"];

pub const DEFAULT_NEGATION_WINDOW: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("polarity of {word:?} is {value}, outside [-1, 1]")]
    PolarityOutOfRange { word: String, value: f64 },
    #[error("verb lexicon is empty")]
    EmptyVerbs,
    #[error("negation window must be at least 1")]
    BadWindow,
    #[error("{0:?} is listed as both personal and impersonal")]
    OverlappingPronouns(String),
    #[error("personal pronoun set is missing {0:?}")]
    MissingPersonal(String),
}

fn entries(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn word_set(source: &str) -> BTreeSet<String> {
    entries(source).map(|(_, w)| w.to_lowercase()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerbLexicon {
    verbs: BTreeSet<String>,
}

impl VerbLexicon {
    pub fn parse(source: &str) -> Result<Self, LexiconError> {
        Self::from_words(word_set(source))
    }

    pub fn from_words<I, S>(words: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let verbs: BTreeSet<String> = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        if verbs.is_empty() {
            return Err(LexiconError::EmptyVerbs);
        }
        Ok(VerbLexicon { verbs })
    }

    pub fn contains(&self, lower: &str) -> bool {
        self.verbs.contains(lower)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.verbs.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.verbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty()
    }
}

impl Default for VerbLexicon {
    fn default() -> Self {
        VerbLexicon::parse(DEFAULT_VERBS).expect("shipped verb lexicon is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarityLexicon {
    scores: BTreeMap<String, f64>,
    negations: BTreeSet<String>,
    window: usize,
}

impl PolarityLexicon {
    /// `polarity` holds `word<TAB>score` lines, `negations` one word per line.
    pub fn parse(polarity: &str, negations: &str, window: usize) -> Result<Self, LexiconError> {
        let mut scores = BTreeMap::new();
        for (line, entry) in entries(polarity) {
            let (word, value) = entry.split_once('\t').ok_or_else(|| LexiconError::Parse {
                line,
                message: "expected word<TAB>polarity".into(),
            })?;
            let value: f64 = value.trim().parse().map_err(|_| LexiconError::Parse {
                line,
                message: format!("bad polarity {value:?}"),
            })?;
            scores.insert(word.trim().to_lowercase(), value);
        }
        Self::new(scores, word_set(negations), window)
    }

    pub fn new(
        scores: BTreeMap<String, f64>,
        negations: BTreeSet<String>,
        window: usize,
    ) -> Result<Self, LexiconError> {
        if window == 0 {
            return Err(LexiconError::BadWindow);
        }
        if let Some((word, &value)) = scores.iter().find(|(_, v)| !(-1.0..=1.0).contains(*v)) {
            return Err(LexiconError::PolarityOutOfRange {
                word: word.clone(),
                value,
            });
        }
        Ok(PolarityLexicon {
            scores,
            negations,
            window,
        })
    }

    pub fn polarity(&self, lower: &str) -> Option<f64> {
        self.scores.get(lower).copied()
    }

    pub fn is_negation(&self, lower: &str) -> bool {
        self.negations.contains(lower)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.scores.iter().map(|(w, &v)| (w.as_str(), v))
    }

    pub fn negations(&self) -> impl Iterator<Item = &str> {
        self.negations.iter().map(String::as_str)
    }
}

impl Default for PolarityLexicon {
    fn default() -> Self {
        PolarityLexicon::parse(DEFAULT_POLARITY, DEFAULT_NEGATIONS, DEFAULT_NEGATION_WINDOW)
            .expect("shipped polarity lexicon is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PronounSets {
    personal: BTreeSet<String>,
    impersonal: BTreeSet<String>,
}

impl PronounSets {
    pub fn parse(personal: &str, impersonal: &str) -> Result<Self, LexiconError> {
        Self::new(word_set(personal), word_set(impersonal))
    }

    pub fn new(personal: BTreeSet<String>, impersonal: BTreeSet<String>) -> Result<Self, LexiconError> {
        if let Some(missing) = REQUIRED_PERSONAL.iter().find(|p| !personal.contains(**p)) {
            return Err(LexiconError::MissingPersonal(missing.to_string()));
        }
        if let Some(shared) = personal.intersection(&impersonal).next() {
            return Err(LexiconError::OverlappingPronouns(shared.clone()));
        }
        Ok(PronounSets { personal, impersonal })
    }

    pub fn is_personal(&self, lower: &str) -> bool {
        self.personal.contains(lower)
    }

    pub fn is_impersonal(&self, lower: &str) -> bool {
        self.impersonal.contains(lower)
    }

    pub fn personal(&self) -> impl Iterator<Item = &str> {
        self.personal.iter().map(String::as_str)
    }

    pub fn impersonal(&self) -> impl Iterator<Item = &str> {
        self.impersonal.iter().map(String::as_str)
    }
}

impl Default for PronounSets {
    fn default() -> Self {
        PronounSets::parse(DEFAULT_PERSONAL, DEFAULT_IMPERSONAL).expect("shipped pronoun sets are valid")
    }
}

/// Raw text of every resource, kept so profiles can record what they ran with.
#[derive(Debug, Clone)]
pub struct ResourceSources {
    pub abbreviations: String,
    pub verbs: String,
    pub polarity: String,
    pub negations: String,
    pub personal: String,
    pub impersonal: String,
}

impl Default for ResourceSources {
    fn default() -> Self {
        ResourceSources {
            abbreviations: crate::text::DEFAULT_ABBREVIATIONS.to_string(),
            verbs: DEFAULT_VERBS.to_string(),
            polarity: DEFAULT_POLARITY.to_string(),
            negations: DEFAULT_NEGATIONS.to_string(),
            personal: DEFAULT_PERSONAL.to_string(),
            impersonal: DEFAULT_IMPERSONAL.to_string(),
        }
    }
}

impl ResourceSources {
    pub fn digests(&self) -> BTreeMap<String, String> {
        [
            ("abbreviations", &self.abbreviations),
            ("verbs", &self.verbs),
            ("polarity", &self.polarity),
            ("negations", &self.negations),
            ("personal", &self.personal),
            ("impersonal", &self.impersonal),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), sha256_hex(v.as_bytes())))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_resources_load() {
        let verbs = VerbLexicon::default();
        assert!(verbs.contains("fix"));
        assert!(verbs.iter().all(|v| v == v.to_lowercase()));
        let lex = PolarityLexicon::default();
        assert_eq!(lex.polarity("good"), Some(0.7));
        assert!(lex.is_negation("not"));
        assert!(lex.negations().all(|n| lex.polarity(n).is_none()));
        let pron = PronounSets::default();
        assert!(pron.is_personal("you"));
        assert!(pron.is_impersonal("theirs"));
        assert_eq!(pron.impersonal().count(), 12);
    }

    #[test]
    fn rejects_out_of_range_polarity() {
        let err = PolarityLexicon::parse("great\t1.5\n", "", 1).unwrap_err();
        assert!(matches!(err, LexiconError::PolarityOutOfRange { .. }));
        assert!(matches!(
            PolarityLexicon::parse("great 0.5\n", "", 1),
            Err(LexiconError::Parse { line: 1, .. })
        ));
        assert_eq!(PolarityLexicon::parse("", "", 0), Err(LexiconError::BadWindow));
    }

    #[test]
    fn pronoun_sets_validate() {
        assert_eq!(
            PronounSets::parse("i\nme\nmy\nwe\nus\nour\n", "it\n"),
            Err(LexiconError::MissingPersonal("you".into()))
        );
        assert_eq!(
            PronounSets::parse(DEFAULT_PERSONAL, "it\nyou\n"),
            Err(LexiconError::OverlappingPronouns("you".into()))
        );
    }

    #[test]
    fn verbs_are_case_folded() {
        let verbs = VerbLexicon::parse("# c\nFix\nRUN\n").unwrap();
        assert!(verbs.contains("fix") && verbs.contains("run"));
        assert_eq!(VerbLexicon::parse("# only a comment\n"), Err(LexiconError::EmptyVerbs));
    }
}
