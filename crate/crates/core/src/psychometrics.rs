//! Scoring of MPI multiple-choice responses into Big-Five trait reports.
//!
//! Options map onto a five-point scale: for positively keyed items
//! A=5 (Very Accurate) down to E=1 (Very Inaccurate); negatively keyed items
//! are reversed. Means and population standard deviations are taken over
//! answered items only.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::sha256_hex;

#[derive(Debug, Error, PartialEq)]
pub enum PsychometricsError {
    #[error("response refers to unknown item {0:?}")]
    UnknownItem(String),
    #[error("more than one response for item {0:?}")]
    DuplicateResponse(String),
    #[error("inventory item id {0:?} is not unique")]
    DuplicateItem(String),
    #[error("inventory item {0:?} has an empty statement")]
    EmptyStatement(String),
    #[error("malformed input: {0}")]
    Format(String),
}

/// The five dimensions, always in O, C, E, A, N order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraitDim {
    #[serde(rename = "O")]
    Openness,
    #[serde(rename = "C")]
    Conscientiousness,
    #[serde(rename = "E")]
    Extraversion,
    #[serde(rename = "A")]
    Agreeableness,
    #[serde(rename = "N")]
    Neuroticism,
}

impl TraitDim {
    pub const ALL: [TraitDim; 5] = [
        TraitDim::Openness,
        TraitDim::Conscientiousness,
        TraitDim::Extraversion,
        TraitDim::Agreeableness,
        TraitDim::Neuroticism,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TraitDim::Openness => "O",
            TraitDim::Conscientiousness => "C",
            TraitDim::Extraversion => "E",
            TraitDim::Agreeableness => "A",
            TraitDim::Neuroticism => "N",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TraitDim::Openness => "Openness",
            TraitDim::Conscientiousness => "Conscientiousness",
            TraitDim::Extraversion => "Extraversion",
            TraitDim::Agreeableness => "Agreeableness",
            TraitDim::Neuroticism => "Neuroticism",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Accepts the one-letter code or the full name, case-insensitively.
    pub fn parse(s: &str) -> Option<TraitDim> {
        let s = s.trim();
        TraitDim::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s) || t.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for TraitDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Key {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Choice {
    A,
    B,
    C,
    D,
    E,
}

impl Choice {
    pub const ALL: [Choice; 5] = [Choice::A, Choice::B, Choice::C, Choice::D, Choice::E];

    pub fn from_letter(c: char) -> Option<Choice> {
        match c.to_ascii_uppercase() {
            'A' => Some(Choice::A),
            'B' => Some(Choice::B),
            'C' => Some(Choice::C),
            'D' => Some(Choice::D),
            'E' => Some(Choice::E),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpiItem {
    pub id: String,
    pub statement: String,
    #[serde(rename = "trait")]
    pub trait_dim: TraitDim,
    pub key: Key,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Choice(Choice),
    Unparsed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpiResponse {
    pub item_id: String,
    pub outcome: Outcome,
}

/// One line of the responses JSON-lines file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub item_id: String,
    pub raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<Choice>,
}

impl ResponseRecord {
    pub fn from_response(response: &MpiResponse, raw: impl Into<String>) -> Self {
        ResponseRecord {
            item_id: response.item_id.clone(),
            raw: raw.into(),
            choice: match response.outcome {
                Outcome::Choice(c) => Some(c),
                Outcome::Unparsed(_) => None,
            },
        }
    }

    /// An explicit `choice` wins; otherwise the raw text is parsed.
    pub fn to_response(&self) -> MpiResponse {
        let outcome = match self.choice {
            Some(c) => Outcome::Choice(c),
            None => parse_choice(&self.raw),
        };
        MpiResponse {
            item_id: self.item_id.clone(),
            outcome,
        }
    }
}

/// Validated list of items with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Inventory {
    items: Vec<MpiItem>,
    index: HashMap<String, usize>,
}

impl Inventory {
    pub fn new(items: Vec<MpiItem>) -> Result<Self, PsychometricsError> {
        let mut index = HashMap::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if item.statement.trim().is_empty() {
                return Err(PsychometricsError::EmptyStatement(item.id.clone()));
            }
            if index.insert(item.id.clone(), i).is_some() {
                return Err(PsychometricsError::DuplicateItem(item.id.clone()));
            }
        }
        Ok(Inventory { items, index })
    }

    /// JSON array of `{id, statement, trait: "O|C|E|A|N", key: "+|-"}`.
    pub fn from_json(json: &str) -> Result<Self, PsychometricsError> {
        let items: Vec<MpiItem> =
            serde_json::from_str(json).map_err(|e| PsychometricsError::Format(e.to_string()))?;
        Inventory::new(items)
    }

    pub fn items(&self) -> &[MpiItem] {
        &self.items
    }

    pub fn get(&self, id: &str) -> Option<&MpiItem> {
        self.index.get(id).map(|&i| &self.items[i])
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// SHA-256 of the canonical JSON serialization of the items.
    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(&self.items).expect("items serialize"))
    }
}

pub fn score_choice(key: Key, choice: Choice) -> u8 {
    let positive = 5 - choice as u8;
    match key {
        Key::Positive => positive,
        Key::Negative => 6 - positive,
    }
}

/// First standalone `(A)`..`(E)` marker anywhere in the text, else a leading
/// option letter (`B`, `b)`, `C.` ...). A leading "A" followed by a lowercase
/// word reads as the article and does not count.
pub fn parse_choice(raw: &str) -> Outcome {
    let chars: Vec<char> = raw.chars().collect();
    for w in chars.windows(3) {
        if w[0] == '(' && w[2] == ')' {
            if let Some(c) = Choice::from_letter(w[1]) {
                return Outcome::Choice(c);
            }
        }
    }
    let trimmed: Vec<char> = raw.trim_start().chars().collect();
    if let Some(&first) = trimmed.first() {
        if let Some(choice) = Choice::from_letter(first) {
            let standalone = match trimmed.get(1) {
                None => true,
                Some(&next) if next.is_whitespace() => {
                    let rest = trimmed[1..].iter().find(|c| !c.is_whitespace());
                    !(first.eq_ignore_ascii_case(&'a') && rest.is_some_and(|c| c.is_lowercase()))
                }
                Some(&next) => matches!(next, '.' | ')' | ':' | ',' | ';' | ']'),
            };
            if standalone {
                return Outcome::Choice(choice);
            }
        }
    }
    Outcome::Unparsed(raw.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitSummary {
    /// `None` when no item of this trait was answered.
    pub mean: Option<f64>,
    pub sigma: Option<f64>,
    pub n_answered: usize,
    pub n_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitReport {
    pub traits: BTreeMap<TraitDim, TraitSummary>,
    pub scale: String,
    pub sigma_convention: String,
}

pub const SCALE_NOTE: &str = "positive key: A=5 B=4 C=3 D=2 E=1; negative key reversed";
pub const SIGMA_NOTE: &str = "population (divide by N) over answered items";

impl TraitReport {
    pub fn get(&self, dim: TraitDim) -> &TraitSummary {
        &self.traits[&dim]
    }

    pub fn means(&self) -> [Option<f64>; 5] {
        TraitDim::ALL.map(|d| self.get(d).mean)
    }

    /// Header plus one record: Score and sigma for each of O, C, E, A, N.
    /// Undefined values are written as `NA`.
    pub fn to_tsv(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        let mut header = Vec::new();
        let mut row = Vec::new();
        for dim in TraitDim::ALL {
            header.push(format!("{}_score", dim.code()));
            header.push(format!("{}_sigma", dim.code()));
            let s = self.get(dim);
            row.push(fmt(s.mean));
            row.push(fmt(s.sigma));
        }
        format!("{}\n{}\n", header.join("\t"), row.join("\t"))
    }

    /// `model,O,C,E,A,N` row, the trait-matrix input format.
    pub fn to_matrix_csv(&self, model: &str) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        let means: Vec<String> = self.means().into_iter().map(fmt).collect();
        format!("model,O,C,E,A,N\n{model},{}\n", means.join(","))
    }
}

pub fn score_traits(
    inventory: &Inventory,
    responses: &[MpiResponse],
) -> Result<TraitReport, PsychometricsError> {
    let mut seen = HashSet::with_capacity(responses.len());
    let mut scores: BTreeMap<TraitDim, Vec<f64>> = TraitDim::ALL.iter().map(|&d| (d, Vec::new())).collect();
    let mut skipped: BTreeMap<TraitDim, usize> = TraitDim::ALL.iter().map(|&d| (d, 0)).collect();
    for response in responses {
        let item = inventory
            .get(&response.item_id)
            .ok_or_else(|| PsychometricsError::UnknownItem(response.item_id.clone()))?;
        if !seen.insert(response.item_id.as_str()) {
            return Err(PsychometricsError::DuplicateResponse(response.item_id.clone()));
        }
        match &response.outcome {
            Outcome::Choice(c) => scores
                .get_mut(&item.trait_dim)
                .expect("all dims present")
                .push(score_choice(item.key, *c) as f64),
            Outcome::Unparsed(_) => *skipped.get_mut(&item.trait_dim).expect("all dims present") += 1,
        }
    }
    let traits = TraitDim::ALL
        .iter()
        .map(|&dim| {
            let values = &scores[&dim];
            // Integer sums keep the result independent of response order.
            let n = values.len();
            let (mean, sigma) = if n == 0 {
                (None, None)
            } else {
                let sum: f64 = values.iter().sum();
                let sum_sq: f64 = values.iter().map(|v| v * v).sum();
                let mean = sum / n as f64;
                let var = (sum_sq / n as f64 - mean * mean).max(0.0);
                (Some(mean), Some(var.sqrt()))
            };
            (
                dim,
                TraitSummary {
                    mean,
                    sigma,
                    n_answered: n,
                    n_skipped: skipped[&dim],
                },
            )
        })
        .collect();
    Ok(TraitReport {
        traits,
        scale: SCALE_NOTE.into(),
        sigma_convention: SIGMA_NOTE.into(),
    })
}

/// Reads the responses JSON-lines format; blank lines are skipped.
pub fn parse_response_lines(source: &str) -> Result<Vec<ResponseRecord>, PsychometricsError> {
    source
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PsychometricsError::Format(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn write_response_lines(records: &[ResponseRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}
