//! Budget-matched corpus sampling: fixed-length chunking and seeded
//! selection without replacement.

use std::io::Write;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{InputFile, RawDocument};
use crate::digest::sha256_hex;
use crate::rng::{self, SeededRng};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplerError {
    #[error("token budget {budget} is smaller than one sequence of {seq_len}")]
    BudgetTooSmall { budget: u64, seq_len: usize },
    #[error("need {needed} chunks but only {available} are available")]
    InsufficientChunks { needed: u64, available: u64 },
    #[error("sequence length must be at least 1")]
    ZeroSeqLen,
}

/// Splits text into the units that chunks are made of.
pub trait TokenCounter: Send + Sync {
    fn name(&self) -> &str;
    fn tokens(&self, text: &str) -> Vec<String>;
}

/// Whitespace-delimited tokens.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceTokenizer;

impl TokenCounter for WhitespaceTokenizer {
    fn name(&self) -> &str {
        "whitespace"
    }

    fn tokens(&self, text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_string).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceChunk {
    pub source: String,
    /// Index of the first token within the source document.
    pub offset: usize,
    pub tokens: Vec<String>,
}

/// Number of full windows in `n_tokens`.
pub fn chunk_count(n_tokens: u64, seq_len: usize) -> u64 {
    n_tokens / seq_len as u64
}

/// Start offsets of the full windows in `n_tokens`.
pub fn chunk_offsets(n_tokens: usize, seq_len: usize) -> impl Iterator<Item = usize> {
    (0..n_tokens / seq_len.max(1)).map(move |i| i * seq_len)
}

/// Consecutive non-overlapping windows; a trailing partial window is dropped.
pub fn chunk(tokens: &[String], seq_len: usize, source: &str) -> Result<Vec<SequenceChunk>, SamplerError> {
    if seq_len == 0 {
        return Err(SamplerError::ZeroSeqLen);
    }
    Ok(tokens
        .chunks_exact(seq_len)
        .enumerate()
        .map(|(i, window)| SequenceChunk {
            source: source.to_string(),
            offset: i * seq_len,
            tokens: window.to_vec(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub budget_tokens: u64,
    pub seq_len: usize,
    pub seed: u64,
    pub n_sequences: u64,
}

impl SamplePlan {
    pub fn selected_tokens(&self) -> u64 {
        self.n_sequences * self.seq_len as u64
    }
}

/// Smallest number of sequences whose tokens reach the budget.
pub fn plan(budget_tokens: u64, seq_len: usize, seed: u64) -> Result<SamplePlan, SamplerError> {
    if seq_len == 0 {
        return Err(SamplerError::ZeroSeqLen);
    }
    if budget_tokens < seq_len as u64 {
        return Err(SamplerError::BudgetTooSmall {
            budget: budget_tokens,
            seq_len,
        });
    }
    Ok(SamplePlan {
        budget_tokens,
        seq_len,
        seed,
        n_sequences: budget_tokens.div_ceil(seq_len as u64),
    })
}

/// Seeded shuffle of `items`, truncated to `plan.n_sequences`.
pub fn sample<T>(mut items: Vec<T>, plan: &SamplePlan) -> Result<Vec<T>, SamplerError> {
    let available = items.len() as u64;
    if available < plan.n_sequences {
        return Err(SamplerError::InsufficientChunks {
            needed: plan.n_sequences,
            available,
        });
    }
    SeededRng::new(plan.seed).shuffle(&mut items);
    items.truncate(plan.n_sequences as usize);
    Ok(items)
}

/// Chunks every document, in document order, spreading the work over threads.
pub fn chunk_documents(
    docs: &[RawDocument],
    tokenizer: &dyn TokenCounter,
    seq_len: usize,
) -> Result<Vec<SequenceChunk>, SamplerError> {
    if seq_len == 0 {
        return Err(SamplerError::ZeroSeqLen);
    }
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(docs.len().max(1));
    let per = docs.len().div_ceil(workers).max(1);
    let parts: Vec<Vec<SequenceChunk>> = thread::scope(|scope| {
        let handles: Vec<_> = docs
            .chunks(per)
            .map(|group| {
                scope.spawn(move || {
                    group
                        .iter()
                        .flat_map(|d| chunk(&tokenizer.tokens(&d.text), seq_len, &d.id).unwrap_or_default())
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chunk worker panicked")).collect()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Serializes chunks as JSON-lines, one `{source, offset, tokens}` per line.
pub fn write_chunks(chunks: &[SequenceChunk], mut out: impl Write) -> std::io::Result<()> {
    for c in chunks {
        serde_json::to_writer(&mut out, c)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn chunks_to_jsonl(chunks: &[SequenceChunk]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_chunks(chunks, &mut buf).expect("writing to memory");
    buf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub budget_tokens: u64,
    pub seq_len: usize,
    pub seed: u64,
    pub n_sequences: u64,
    pub selected_tokens: u64,
    pub rounding: String,
    pub replacement: bool,
    pub rng: String,
    pub tokenizer: String,
    pub inputs: Vec<ManifestInput>,
    pub available_chunks: Option<u64>,
    pub output_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestInput {
    pub path: String,
    pub sha256: String,
}

impl Manifest {
    pub fn for_plan(plan: &SamplePlan, tokenizer: &str) -> Manifest {
        Manifest {
            budget_tokens: plan.budget_tokens,
            seq_len: plan.seq_len,
            seed: plan.seed,
            n_sequences: plan.n_sequences,
            selected_tokens: plan.selected_tokens(),
            rounding: "ceil".into(),
            replacement: false,
            rng: rng::ALGORITHM.into(),
            tokenizer: tokenizer.into(),
            inputs: Vec::new(),
            available_chunks: None,
            output_sha256: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub struct SampleRun {
    pub chunks: Vec<SequenceChunk>,
    pub jsonl: Vec<u8>,
    pub manifest: Manifest,
}

/// Chunk, sample and describe a corpus in one step.
pub fn run(
    files: &[InputFile],
    docs: &[RawDocument],
    tokenizer: &dyn TokenCounter,
    plan: &SamplePlan,
) -> Result<SampleRun, SamplerError> {
    let all = chunk_documents(docs, tokenizer, plan.seq_len)?;
    let available = all.len() as u64;
    let chunks = sample(all, plan)?;
    let jsonl = chunks_to_jsonl(&chunks);
    let mut manifest = Manifest::for_plan(plan, tokenizer.name());
    manifest.inputs = files
        .iter()
        .map(|f| ManifestInput {
            path: f.path.clone(),
            sha256: f.sha256.clone(),
        })
        .collect();
    manifest.available_chunks = Some(available);
    manifest.output_sha256 = Some(sha256_hex(&jsonl));
    Ok(SampleRun {
        chunks,
        jsonl,
        manifest,
    })
}
