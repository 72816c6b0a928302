//! Tokenization and sentence segmentation shared by every text-facing module.
//!
//! Both functions are pure: the same input always yields byte-identical
//! tokens and sentences, which is what makes corpus profiles reproducible.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::Serialize;

/// Byte offsets into the source text, half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn range(self) -> Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TokenKind {
    Word,
    Number,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    fn new(text: &str, start: usize, end: usize, kind: TokenKind) -> Self {
        let surface = text[start..end].to_string();
        let lower = surface.to_lowercase();
        Token {
            surface,
            lower,
            kind,
            span: Span { start, end },
        }
    }

    /// Word or Number: the tokens that count toward sentence length.
    pub fn is_lexical(&self) -> bool {
        matches!(self.kind, TokenKind::Word | TokenKind::Number)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sentence {
    /// Half-open index range into the owning document's token list.
    pub token_range: (usize, usize),
    pub span: Span,
}

impl Sentence {
    pub fn tokens<'a>(&self, doc: &'a Document) -> &'a [Token] {
        &doc.tokens[self.token_range.0..self.token_range.1]
    }

    pub fn len(&self) -> usize {
        self.token_range.1 - self.token_range.0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Closed list of abbreviations that never terminate a sentence.
#[derive(Debug, Clone)]
pub struct Abbreviations {
    entries: BTreeSet<String>,
}

pub const DEFAULT_ABBREVIATIONS: &str = include_str!("../resources/abbreviations.txt");

impl Abbreviations {
    /// One entry per line; blank lines and `#` comments are ignored.
    pub fn parse(source: &str) -> Self {
        let entries = source
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Abbreviations { entries }
    }

    pub fn contains(&self, candidate: &str) -> bool {
        self.entries.contains(&candidate.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for Abbreviations {
    fn default() -> Self {
        Abbreviations::parse(DEFAULT_ABBREVIATIONS)
    }
}

/// A parsed text. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Document {
    pub text: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn parse(text: impl Into<String>, abbreviations: &Abbreviations) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        let sentences = segment(&text, &tokens, abbreviations);
        Document {
            text,
            tokens,
            sentences,
        }
    }

    pub fn word_tokens(&self) -> impl Iterator<Item = &Token> {
        word_tokens(self)
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Splits text into Word, Number and Punct tokens.
///
/// * Word: a maximal run of alphabetic characters; an apostrophe or hyphen
///   is kept only when it sits between two alphabetic characters.
/// * Number: a run of digits; `.` or `,` is kept when it sits between digits.
/// * Punct: any other non-whitespace character, one per token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let end_of = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let kind = if c.is_alphabetic() {
            i += 1;
            while i < chars.len() {
                let c = chars[i].1;
                if c.is_alphabetic() {
                    i += 1;
                } else if is_joiner(c) && chars.get(i + 1).is_some_and(|n| n.1.is_alphabetic()) {
                    i += 2;
                } else {
                    break;
                }
            }
            TokenKind::Word
        } else if c.is_ascii_digit() {
            i += 1;
            while i < chars.len() {
                let c = chars[i].1;
                if c.is_ascii_digit() {
                    i += 1;
                } else if matches!(c, '.' | ',')
                    && chars.get(i + 1).is_some_and(|n| n.1.is_ascii_digit())
                {
                    i += 2;
                } else {
                    break;
                }
            }
            TokenKind::Number
        } else {
            i += 1;
            TokenKind::Punct
        };
        tokens.push(Token::new(text, start, end_of(i), kind));
    }
    tokens
}

fn is_terminal(tok: &Token) -> bool {
    tok.kind == TokenKind::Punct && matches!(tok.surface.as_str(), "." | "!" | "?")
}

fn is_closer(tok: &Token) -> bool {
    tok.kind == TokenKind::Punct
        && matches!(
            tok.surface.as_str(),
            "\"" | "'" | ")" | "]" | "}" | "\u{201d}" | "\u{2019}" | "\u{bb}"
        )
}

/// True if the gap between two byte offsets contains a blank line.
fn has_paragraph_break(gap: &str) -> bool {
    gap.chars().filter(|&c| c == '\n').count() >= 2
}

/// The run of non-whitespace text that ends at `end`, e.g. `e.g.` in
/// `see e.g. apples`.
fn trailing_run(text: &str, end: usize) -> &str {
    let head = &text[..end];
    let start = head
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map_or(0, |(b, c)| b + c.len_utf8());
    let run = &head[start..];
    // Leading openers such as `(` do not belong to the abbreviation.
    run.trim_start_matches(|c: char| !c.is_alphanumeric())
}

fn segment(text: &str, tokens: &[Token], abbreviations: &Abbreviations) -> Vec<Sentence> {
    // Raw boundaries: index one past the last token of each sentence.
    let mut cuts = Vec::new();
    let mut sentence_start = 0;
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        let mut last = i;
        let mut boundary = false;
        if is_terminal(tok) {
            while last + 1 < tokens.len()
                && tokens[last + 1].span.start == tokens[last].span.end
                && (is_closer(&tokens[last + 1]) || is_terminal(&tokens[last + 1]))
            {
                last += 1;
            }
            let after = tokens[last].span.end;
            let followed_by_space = text[after..].chars().next().is_none_or(char::is_whitespace);
            let abbreviation =
                tok.surface == "." && last == i && abbreviations.contains(trailing_run(text, tok.span.end));
            // "1. Install it." keeps its list marker.
            let list_marker = tok.surface == "."
                && last == i
                && i == sentence_start + 1
                && tokens[sentence_start].kind == TokenKind::Number
                && tokens[sentence_start].span.end == tok.span.start;
            boundary = followed_by_space && !abbreviation && !list_marker;
        }
        if !boundary {
            if let Some(next) = tokens.get(last + 1) {
                boundary = has_paragraph_break(&text[tokens[last].span.end..next.span.start]);
            }
        }
        if boundary {
            cuts.push(last + 1);
            sentence_start = last + 1;
        }
        i = last + 1;
    }
    if cuts.last() != Some(&tokens.len()) && !tokens.is_empty() {
        cuts.push(tokens.len());
    }

    let mut ranges: Vec<(usize, usize)> = Vec::with_capacity(cuts.len());
    let mut start = 0;
    for cut in cuts {
        ranges.push((start, cut));
        start = cut;
    }

    // A run with no Word/Number token (stray "!!!") is folded into its
    // neighbour so every sentence carries at least one lexical token
    // whenever the document has any.
    let lexical = |r: &(usize, usize)| tokens[r.0..r.1].iter().any(Token::is_lexical);
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(ranges.len());
    let mut pending_start: Option<usize> = None;
    for r in ranges {
        if lexical(&r) {
            let s = pending_start.take().unwrap_or(r.0);
            merged.push((s, r.1));
        } else if let Some(prev) = merged.last_mut() {
            prev.1 = r.1;
        } else {
            pending_start.get_or_insert(r.0);
        }
    }
    if let Some(s) = pending_start {
        merged.push((s, tokens.len()));
    }

    merged
        .into_iter()
        .map(|(a, b)| Sentence {
            token_range: (a, b),
            span: Span {
                start: tokens[a].span.start,
                end: tokens[b - 1].span.end,
            },
        })
        .collect()
}

/// Tokenizes and segments `text` into sentences.
pub fn split_sentences(text: &str, abbreviations: &Abbreviations) -> (Vec<Token>, Vec<Sentence>) {
    let tokens = tokenize(text);
    let sentences = segment(text, &tokens, abbreviations);
    (tokens, sentences)
}

pub fn word_tokens(doc: &Document) -> impl Iterator<Item = &Token> {
    doc.tokens.iter().filter(|t| t.kind == TokenKind::Word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    fn count(text: &str) -> usize {
        split_sentences(text, &Abbreviations::default()).1.len()
    }

    #[test]
    fn tokenizes_imperative_example() {
        let toks = tokenize("Fix the syntax error.");
        assert_eq!(surfaces(&toks), ["Fix", "the", "syntax", "error", "."]);
        let words = toks.iter().filter(|t| t.kind == TokenKind::Word).count();
        assert_eq!(words, 4);
        assert_eq!(toks[4].kind, TokenKind::Punct);
        assert_eq!(toks[0].lower, "fix");
    }

    #[test]
    fn empty_text_has_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \n\t ").is_empty());
    }

    #[test]
    fn numbers_and_contractions() {
        let toks = tokenize("3.14 it's");
        assert_eq!(surfaces(&toks), ["3.14", "it's"]);
        assert_eq!(toks[0].kind, TokenKind::Number);
        assert_eq!(toks[1].kind, TokenKind::Word);
    }

    #[test]
    fn joiners_only_inside_words() {
        let toks = tokenize("well-known 'quoted' end- 1,000,000. x");
        assert_eq!(
            surfaces(&toks),
            ["well-known", "'", "quoted", "'", "end", "-", "1,000,000", ".", "x"]
        );
    }

    #[test]
    fn unicode_words_fold_case() {
        let toks = tokenize("Ärger ÜBER Straße");
        assert!(toks.iter().all(|t| t.kind == TokenKind::Word));
        assert_eq!(toks[1].lower, "über");
        assert_eq!(toks[1].span, Span { start: 7, end: 12 });
    }

    #[test]
    fn three_terminal_marks() {
        assert_eq!(count("A cat. A dog? Go!"), 3);
    }

    #[test]
    fn abbreviation_does_not_terminate() {
        assert_eq!(count("e.g. apples"), 1);
        assert_eq!(count("Ask Dr. Smith about it. He knows."), 2);
        assert_eq!(count("Apples (e.g. red ones) are fine."), 1);
    }

    #[test]
    fn decimal_point_is_not_a_boundary() {
        assert_eq!(count("Pi is 3.14 roughly. Yes."), 2);
        assert_eq!(count("1. Mix. 2. Bake."), 2);
        assert_eq!(count("It cost 12. Then more."), 2);
    }

    #[test]
    fn closing_quote_after_terminal() {
        let (toks, sents) = split_sentences("He said \"stop.\" Then left.", &Abbreviations::default());
        assert_eq!(sents.len(), 2);
        let first = &toks[sents[0].token_range.0..sents[0].token_range.1];
        assert_eq!(first.last().unwrap().surface, "\"");
    }

    #[test]
    fn blank_line_breaks_paragraph() {
        assert_eq!(count("A heading\n\nBody text here"), 2);
        assert_eq!(count("one line\nnext line"), 1);
    }

    #[test]
    fn repeated_marks_close_once() {
        assert_eq!(count("Really?! Yes!!! ok"), 3);
    }

    #[test]
    fn punct_only_runs_fold_into_neighbour() {
        let (toks, sents) = split_sentences("Hi. ! ? There.", &Abbreviations::default());
        assert_eq!(sents.len(), 2);
        assert_eq!(sents[0].token_range, (0, 4));
        assert_eq!(sents[1].token_range, (4, toks.len()));
        let (_, sents) = split_sentences("!!! ...", &Abbreviations::default());
        assert_eq!(sents.len(), 1);
    }

    #[test]
    fn ten_sentence_fixture() {
        let text = include_str!("../fixtures/ten_sentences.txt");
        assert_eq!(count(text), 10);
    }

    #[test]
    fn word_tokens_filters_kind() {
        let abbr = Abbreviations::default();
        assert_eq!(Document::parse("Fix the syntax error.", &abbr).word_tokens().count(), 4);
        assert_eq!(Document::parse("!!!", &abbr).word_tokens().count(), 0);
        // hand count: We(1) paid(2) 12 $ 40 for(3) it's(4) state-of-the-art(5) kit(6) ; ok(7) ?
        let doc = Document::parse("We paid 12 $ 40 for it's state-of-the-art kit; ok?", &abbr);
        assert_eq!(doc.word_tokens().count(), 7);
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn texty() -> impl Strategy<Value = String> {
        prop_oneof![
            any::<String>(),
            "[a-zA-Z0-9 .,!?'\"()\\-\n\t]{0,200}",
            "[a-zäöüßéΩж .!?\u{2019}\u{201d}0-9]{0,120}",
        ]
    }

    proptest! {
        #[test]
        fn tokenize_is_deterministic(text in texty()) {
            prop_assert_eq!(tokenize(&text), tokenize(&text));
            let abbr = Abbreviations::default();
            prop_assert_eq!(Document::parse(text.as_str(), &abbr), Document::parse(text.as_str(), &abbr));
        }

        #[test]
        fn tokens_partition_non_whitespace(text in texty()) {
            let tokens = tokenize(&text);
            let mut pos = 0;
            for t in &tokens {
                prop_assert!(t.span.start >= pos);
                prop_assert!(text[pos..t.span.start].chars().all(char::is_whitespace));
                prop_assert_eq!(&text[t.span.range()], t.surface.as_str());
                prop_assert!(!t.surface.is_empty());
                pos = t.span.end;
            }
            prop_assert!(text[pos..].chars().all(char::is_whitespace));
        }

        #[test]
        fn lower_is_case_folded_surface(text in texty()) {
            for t in tokenize(&text) {
                prop_assert_eq!(t.lower, t.surface.to_lowercase());
            }
        }

        #[test]
        fn sentences_cover_tokens_in_order(text in texty()) {
            let doc = Document::parse(text.as_str(), &Abbreviations::default());
            let mut next = 0;
            for s in &doc.sentences {
                prop_assert_eq!(s.token_range.0, next);
                prop_assert!(s.token_range.1 > s.token_range.0);
                next = s.token_range.1;
            }
            prop_assert_eq!(next, doc.tokens.len());
            if doc.tokens.iter().any(Token::is_lexical) {
                for s in &doc.sentences {
                    prop_assert!(s.tokens(&doc).iter().any(Token::is_lexical));
                }
            }
        }
    }
}
