//! Reading corpora from disk: a single file or a directory of `.txt` and
//! `.jsonl` files, visited in sorted path order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use crate::digest::sha256_hex;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    BadRecord { path: PathBuf, line: usize, message: String },
    #[error("{0} is not valid UTF-8")]
    NotUtf8(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputFile {
    /// Path relative to the corpus root, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDocument {
    /// `<relative path>` for text files, `<relative path>#<line>` for JSON-lines.
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub files: Vec<InputFile>,
    pub documents: Vec<RawDocument>,
}

fn is_corpus_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("txt") | Some("jsonl") | Some("md")
    )
}

fn relative(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let rel = if rel.as_os_str().is_empty() {
        Path::new(path.file_name().unwrap_or_default())
    } else {
        rel
    };
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn parse_jsonl(path: &Path, id: &str, text: &str, out: &mut Vec<RawDocument>) -> Result<(), CorpusError> {
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| CorpusError::BadRecord {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let body = value
            .get("text")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| bad("record has no string field \"text\"".into()))?;
        out.push(RawDocument {
            id: format!("{id}#{}", i + 1),
            text: body.to_string(),
        });
    }
    Ok(())
}

/// Loads every corpus file under `root` (or `root` itself if it is a file).
pub fn read_corpus(root: &Path) -> Result<Corpus, CorpusError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    let meta = fs::metadata(root).map_err(io(root))?;
    let mut paths = Vec::new();
    if meta.is_file() {
        paths.push(root.to_path_buf());
    } else {
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(|e| CorpusError::Io {
                path: e.path().unwrap_or(root).to_path_buf(),
                source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("filesystem loop")),
            })?;
            let hidden = entry.file_name().to_string_lossy().starts_with('.') && entry.depth() > 0;
            if entry.file_type().is_file() && !hidden && is_corpus_file(entry.path()) {
                paths.push(entry.into_path());
            }
        }
    }
    let mut corpus = Corpus::default();
    for path in paths {
        let bytes = fs::read(&path).map_err(io(&path))?;
        let rel = relative(root, &path);
        corpus.files.push(InputFile {
            path: rel.clone(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        let text = String::from_utf8(bytes).map_err(|_| CorpusError::NotUtf8(path.clone()))?;
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            parse_jsonl(&path, &rel, &text, &mut corpus.documents)?;
        } else {
            corpus.documents.push(RawDocument { id: rel, text });
        }
    }
    Ok(corpus)
}
