//! Python bindings for the traitlab toolkit.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use traitlab::analytics::{self, PerformanceTable, Preprocessing, TraitMatrix};
use traitlab::profiler::{self, CorpusProfile, Profiler};
use traitlab::psychometrics::{self, Inventory, Outcome, ResponseRecord, TraitDim};
use traitlab::sampler::{self, Manifest};
use traitlab::synth::{generate_default, ProfileTarget};
use traitlab::text::{self, Abbreviations, Document, TokenKind};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// The five linguistic signals of a corpus.
#[pyclass(name = "CorpusProfile", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyCorpusProfile {
    imperative_ratio: f64,
    ttr: f64,
    avg_sentence_len: f64,
    sentiment_variance: f64,
    detachment: f64,
    n_tokens: u64,
    n_word_tokens: u64,
    n_sentences: u64,
}

impl From<CorpusProfile> for PyCorpusProfile {
    fn from(p: CorpusProfile) -> Self {
        PyCorpusProfile {
            imperative_ratio: p.imperative_ratio,
            ttr: p.ttr,
            avg_sentence_len: p.avg_sentence_len,
            sentiment_variance: p.sentiment_variance,
            detachment: p.detachment,
            n_tokens: p.n_tokens,
            n_word_tokens: p.n_word_tokens,
            n_sentences: p.n_sentences,
        }
    }
}

#[pymethods]
impl PyCorpusProfile {
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("imperative_ratio", self.imperative_ratio)?;
        d.set_item("ttr", self.ttr)?;
        d.set_item("avg_sentence_len", self.avg_sentence_len)?;
        d.set_item("sentiment_variance", self.sentiment_variance)?;
        d.set_item("detachment", self.detachment)?;
        d.set_item("n_tokens", self.n_tokens)?;
        d.set_item("n_word_tokens", self.n_word_tokens)?;
        d.set_item("n_sentences", self.n_sentences)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "CorpusProfile(imperative_ratio={}, ttr={}, avg_sentence_len={}, sentiment_variance={}, detachment={})",
            self.imperative_ratio, self.ttr, self.avg_sentence_len, self.sentiment_variance, self.detachment
        )
    }
}

/// `(surface, kind)` pairs, kind one of "word", "number", "punct".
#[pyfunction]
fn tokenize(text: &str) -> Vec<(String, &'static str)> {
    text::tokenize(text)
        .into_iter()
        .map(|t| {
            let kind = match t.kind {
                TokenKind::Word => "word",
                TokenKind::Number => "number",
                TokenKind::Punct => "punct",
            };
            (t.surface, kind)
        })
        .collect()
}

/// Sentence texts in order.
#[pyfunction]
fn sentences(text: &str) -> Vec<String> {
    let doc = Document::parse(text, &Abbreviations::default());
    doc.sentences
        .iter()
        .map(|s| {
            let tokens = s.tokens(&doc);
            match (tokens.first(), tokens.last()) {
                (Some(a), Some(b)) => doc.text[a.span.start..b.span.end].to_string(),
                _ => String::new(),
            }
        })
        .collect()
}

/// Profiles the documents with the bundled lexicons. `cap` > 0 samples
/// whole documents up to that many tokens.
#[pyfunction]
#[pyo3(signature = (documents, cap = 0, seed = 0))]
fn profile(documents: Vec<String>, cap: u64, seed: u64) -> PyResult<PyCorpusProfile> {
    let abbreviations = Abbreviations::default();
    let docs: Vec<Document> = documents.into_iter().map(|t| Document::parse(t, &abbreviations)).collect();
    let docs = profiler::sample_documents(docs, cap, seed);
    Profiler::default().profile(&docs).map(Into::into).map_err(value_error)
}

/// Letter chosen in a raw completion, or None when unparseable.
#[pyfunction]
fn parse_choice(raw: &str) -> Option<String> {
    match psychometrics::parse_choice(raw) {
        Outcome::Choice(c) => Some(c.letter().to_string()),
        Outcome::Unparsed(_) => None,
    }
}

/// Scores `(item_id, raw completion)` pairs against an inventory given as
/// JSON. One `(code, mean, sigma, n_answered, n_skipped)` per trait, O..N.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn score(
    inventory_json: &str,
    responses: Vec<(String, String)>,
) -> PyResult<Vec<(String, Option<f64>, Option<f64>, usize, usize)>> {
    let inventory = Inventory::from_json(inventory_json).map_err(value_error)?;
    let responses: Vec<_> = responses
        .into_iter()
        .map(|(item_id, raw)| ResponseRecord { item_id, raw, choice: None }.to_response())
        .collect();
    let report = psychometrics::score_traits(&inventory, &responses).map_err(value_error)?;
    Ok(TraitDim::ALL
        .iter()
        .map(|&d| {
            let s = report.get(d);
            (d.code().to_string(), s.mean, s.sigma, s.n_answered, s.n_skipped)
        })
        .collect())
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    analytics::pearson(&x, &y).map(|c| c.r).map_err(value_error)
}

/// `(beta0, beta_j, beta_k)` of `y ~ xj + xk`.
#[pyfunction]
fn ols(xj: Vec<f64>, xk: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    analytics::ols_two(&xj, &xk, &y).map_err(value_error)
}

fn parse_preprocessing(name: &str) -> PyResult<Preprocessing> {
    match name {
        "centered" => Ok(Preprocessing::Centered),
        "standardized" => Ok(Preprocessing::Standardized),
        other => Err(PyValueError::new_err(format!("unknown preprocessing {other:?}"))),
    }
}

/// Principal components of a row-major matrix. Returns a dict with
/// `loadings`, `scores`, `variance_explained` and `eigenvalues`.
#[pyfunction]
#[pyo3(signature = (rows, preprocessing = "standardized", k = 2))]
fn pca<'py>(py: Python<'py>, rows: Vec<Vec<f64>>, preprocessing: &str, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let prep = parse_preprocessing(preprocessing)?;
    let m = rows.first().map_or(0, Vec::len);
    let names: Vec<String> = (0..m).map(|c| format!("x{c}")).collect();
    let result = analytics::principal_components(&rows, &names, prep, k).map_err(value_error)?;
    let d = PyDict::new(py);
    d.set_item("loadings", result.loadings)?;
    d.set_item("scores", result.scores)?;
    d.set_item("variance_explained", result.variance_explained)?;
    d.set_item("eigenvalues", result.eigenvalues)?;
    Ok(d)
}

/// Per-domain single-trait correlations from CSV text:
/// `{domain: {code: r}}`. `base`, when given, is dropped first.
#[pyfunction]
#[pyo3(signature = (traits_csv, performance_csv, base = None))]
fn correlate<'py>(
    py: Python<'py>,
    traits_csv: &str,
    performance_csv: &str,
    base: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut traits = TraitMatrix::from_csv(traits_csv).map_err(value_error)?;
    if let Some(base) = base {
        traits = traits.without(&[base]).map_err(value_error)?;
    }
    let perf = PerformanceTable::from_csv(performance_csv).map_err(value_error)?;
    let matrix = analytics::correlation_matrix(&traits, &perf).map_err(value_error)?;
    let out = PyDict::new(py);
    for (domain, row) in perf.domains().iter().zip(&matrix) {
        let cells = PyDict::new(py);
        for dim in TraitDim::ALL {
            cells.set_item(dim.code(), row[dim.index()].r)?;
        }
        out.set_item(domain, cells)?;
    }
    Ok(out)
}

/// `(n_sequences, selected_tokens, manifest_json)` for a token budget.
#[pyfunction]
#[pyo3(signature = (budget_tokens, seq_len = 512, seed = 0))]
fn plan(budget_tokens: u64, seq_len: usize, seed: u64) -> PyResult<(u64, u64, String)> {
    let plan = sampler::plan(budget_tokens, seq_len, seed).map_err(value_error)?;
    let manifest = Manifest::for_plan(&plan, "whitespace").to_json();
    Ok((plan.n_sequences, plan.selected_tokens(), manifest))
}

/// Synthesizes a corpus for a JSON target. Returns `(text, expected profile)`.
#[pyfunction]
fn synth(target_json: &str) -> PyResult<(String, PyCorpusProfile)> {
    let target: ProfileTarget = serde_json::from_str(target_json).map_err(value_error)?;
    let out = generate_default(&target).map_err(value_error)?;
    Ok((out.text, out.expected.into()))
}

#[pymodule]
fn pytraitlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpusProfile>()?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(sentences, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(parse_choice, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(ols, m)?)?;
    m.add_function(wrap_pyfunction!(pca, m)?)?;
    m.add_function(wrap_pyfunction!(correlate, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    Ok(())
}
