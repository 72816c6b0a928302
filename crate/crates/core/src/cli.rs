//! The `traitlab` command line.
//!
//! Exit status: 0 success, 1 bad data, 2 usage (including unreadable
//! inputs), 3 transport failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analytics::{
    correlation_csv, correlation_matrix, paired_trait_sweep, pca_2d, PcaResult, PerformanceTable, Preprocessing,
    TraitMatrix,
};
use crate::client::{self, ClientError, EndpointConfig};
use crate::corpus::{read_corpus, CorpusError};
use crate::lexicon::{PolarityLexicon, PronounSets, ResourceSources, VerbLexicon, DEFAULT_NEGATION_WINDOW};
use crate::plot::{Scatter, ScatterPoint};
use crate::profiler::{sample_documents, Profiler};
use crate::psychometrics::{parse_response_lines, score_traits, write_response_lines, Inventory, ResponseRecord};
use crate::sampler::{self, Manifest, WhitespaceTokenizer};
use crate::synth::{generate, ProfileTarget};
use crate::text::{Abbreviations, Document};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Transport(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
            CliError::Transport(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Transport(m) => m,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Csv,
}

impl Format {
    fn sep(self) -> &'static str {
        if self == Format::Tsv {
            "\t"
        } else {
            ","
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PreprocessingArg {
    Centered,
    Standardized,
    Both,
}

#[derive(Parser)]
#[command(name = "traitlab", version, about = "Corpus profiling, trait scoring and trait/performance statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linguistic profile of a corpus sample.
    Profile(ProfileArgs),
    /// Score inventory responses per trait.
    Score(ScoreArgs),
    /// Administer an inventory to a chat-completions endpoint.
    Administer(AdministerArgs),
    /// Trait/performance correlations and paired-trait fits.
    Correlate(CorrelateArgs),
    /// Two-component PCA of a trait matrix.
    Pca(PcaArgs),
    /// Budget-matched sequence sampling.
    Sample(SampleArgs),
    /// Synthetic corpus with a known profile.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Corpus file or directory of .txt/.md/.jsonl files.
    corpus: PathBuf,
    /// Word+Number token cap for the sample; 0 profiles everything.
    #[arg(long, default_value_t = 200_000)]
    cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verbs: Option<PathBuf>,
    #[arg(long)]
    polarity: Option<PathBuf>,
    #[arg(long)]
    negations: Option<PathBuf>,
    #[arg(long)]
    personal: Option<PathBuf>,
    #[arg(long)]
    impersonal: Option<PathBuf>,
    #[arg(long)]
    abbreviations: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NEGATION_WINDOW)]
    negation_window: usize,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    inventory: PathBuf,
    /// JSON-lines of {item_id, raw, choice?}.
    #[arg(long)]
    responses: PathBuf,
    /// Row label for the csv (trait-matrix) output.
    #[arg(long, default_value = "model")]
    model: String,
    /// Accepted for uniformity; scoring draws no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdministerArgs {
    #[arg(long)]
    inventory: PathBuf,
    /// Endpoint configuration JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Name of the environment variable holding the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    max_tokens: Option<u32>,
    #[arg(long)]
    max_retries: Option<u32>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    timeout: Option<f64>,
    /// Prompt template file containing `{statement}`.
    #[arg(long)]
    template: Option<PathBuf>,
    /// Seeds the retry jitter.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    traits: PathBuf,
    /// One or more performance tables.
    #[arg(long, required = true)]
    perf: Vec<PathBuf>,
    /// Model id of the base row; results are then reported with and without it.
    #[arg(long)]
    base: Option<String>,
    /// Also fit every unordered trait pair per domain.
    #[arg(long)]
    pairs: bool,
    /// Accepted for uniformity; the computation draws no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PcaArgs {
    #[arg(long)]
    traits: PathBuf,
    #[arg(long, value_enum, default_value_t = PreprocessingArg::Both)]
    preprocessing: PreprocessingArg,
    #[arg(long)]
    base: Option<String>,
    /// Accepted for uniformity; the computation draws no random numbers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// SVG scatter of the scores; one file per result set.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    budget: u64,
    #[arg(long, default_value_t = 512)]
    seq_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus to chunk; without it only the plan manifest is produced.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SynthArgs {
    /// Target profile JSON.
    #[arg(long)]
    target: PathBuf,
    /// Overrides the seed in the target file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult {
    match out {
        Some(path) => write_file(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_profile(args: ProfileArgs) -> CliResult {
    let corpus = read_corpus(&args.corpus).map_err(|e| match e {
        CorpusError::Io { .. } => CliError::Usage(e.to_string()),
        _ => domain(e),
    })?;
    let mut sources = ResourceSources::default();
    for (flag, slot) in [
        (&args.verbs, &mut sources.verbs),
        (&args.polarity, &mut sources.polarity),
        (&args.negations, &mut sources.negations),
        (&args.personal, &mut sources.personal),
        (&args.impersonal, &mut sources.impersonal),
        (&args.abbreviations, &mut sources.abbreviations),
    ] {
        if let Some(path) = flag {
            *slot = read_text(path)?;
        }
    }
    let verbs = VerbLexicon::parse(&sources.verbs).map_err(domain)?;
    let polarity = PolarityLexicon::parse(&sources.polarity, &sources.negations, args.negation_window).map_err(domain)?;
    let pronouns = PronounSets::parse(&sources.personal, &sources.impersonal).map_err(domain)?;
    let abbreviations = Abbreviations::parse(&sources.abbreviations);

    let docs: Vec<Document> = corpus.documents.iter().map(|d| Document::parse(d.text.as_str(), &abbreviations)).collect();
    let total_docs = docs.len();
    let sample = sample_documents(docs, args.cap, args.seed);
    let sampled_tokens: u64 = sample
        .iter()
        .map(|d| d.tokens.iter().filter(|t| t.is_lexical()).count() as u64)
        .sum();
    let profile = Profiler::new(verbs, polarity, pronouns).profile(&sample).map_err(domain)?;

    let text = match args.format {
        Format::Json => to_json(&json!({
            "profile": profile,
            "metadata": {
                "cap_tokens": args.cap,
                "seed": args.seed,
                "sampled_tokens": sampled_tokens,
                "documents_used": sample.len(),
                "documents_total": total_docs,
                "sampling": "seeded document shuffle, whole documents until the cap is reached",
                "rng": crate::rng::ALGORITHM,
                "negation_window": args.negation_window,
                "denominators": {
                    "imperative_ratio": "sentences with at least one word or number token",
                    "ttr": "word tokens",
                    "avg_sentence_len": "word and number tokens per sentence",
                    "sentiment_variance": "population standard deviation over sentences",
                    "detachment": "word tokens",
                },
                "lexicon_digests": sources.digests(),
                "inputs": corpus.files,
            }
        })),
        Format::Tsv => profile.to_tsv(),
        Format::Csv => profile.to_tsv().replace('\t', ","),
    };
    emit(args.out.as_deref(), &text)
}

fn load_inventory(path: &Path) -> CliResult<Inventory> {
    Inventory::from_json(&read_text(path)?).map_err(domain)
}

fn report_text(report: &crate::psychometrics::TraitReport, format: Format, model: &str, extra: serde_json::Value) -> String {
    match format {
        Format::Json => {
            let mut value = serde_json::to_value(report).expect("report serializes");
            if let (Some(obj), serde_json::Value::Object(more)) = (value.as_object_mut(), extra) {
                obj.extend(more);
            }
            to_json(&value)
        }
        Format::Tsv => report.to_tsv(),
        Format::Csv => report.to_matrix_csv(model),
    }
}

fn cmd_score(args: ScoreArgs) -> CliResult {
    let inventory = load_inventory(&args.inventory)?;
    let records = parse_response_lines(&read_text(&args.responses)?).map_err(domain)?;
    let responses: Vec<_> = records.iter().map(ResponseRecord::to_response).collect();
    let report = score_traits(&inventory, &responses).map_err(domain)?;
    let extra = json!({"model": args.model, "inventory_digest": inventory.digest()});
    emit(args.out.as_deref(), &report_text(&report, args.format, &args.model, extra))
}

fn cmd_administer(args: AdministerArgs) -> CliResult {
    let inventory = load_inventory(&args.inventory)?;
    let mut config = match &args.config {
        Some(path) => serde_json::from_str::<EndpointConfig>(&read_text(path)?)
            .map_err(|e| CliError::Usage(format!("bad endpoint config: {e}")))?,
        None => EndpointConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $arg:expr),* $(,)?) => {
            $(if let Some(v) = $arg { config.$field = v; })*
        };
    }
    set!(
        base_url <- args.base_url,
        model <- args.model,
        api_key_env <- args.api_key_env,
        temperature <- args.temperature,
        max_tokens <- args.max_tokens,
        max_retries <- args.max_retries,
        concurrency <- args.concurrency,
        timeout_secs <- args.timeout,
        seed <- args.seed,
    );
    let template = match &args.template {
        Some(path) => read_text(path)?,
        None => client::DEFAULT_TEMPLATE.to_string(),
    };
    let (run, failure) = match client::administer(&inventory, &config, &template) {
        Ok(run) => (run, None),
        Err(ClientError::AllRequestsFailed { first_error, run }) => {
            (*run, Some(CliError::Transport(format!("every request failed: {first_error}"))))
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    write_file(&args.out_dir.join("run.json"), to_json(&run))?;
    write_file(&args.out_dir.join("responses.jsonl"), write_response_lines(&run.response_records()))?;
    if let Some(err) = failure {
        return Err(err);
    }
    let report = score_traits(&inventory, &run.responses).map_err(domain)?;
    let extra = json!({"model": config.model, "inventory_digest": run.inventory_digest});
    emit(None, &report_text(&report, args.format, &config.model, extra))
}

struct RowSet {
    label: &'static str,
    traits: TraitMatrix,
}

fn row_sets(traits: TraitMatrix, base: Option<&str>) -> CliResult<Vec<RowSet>> {
    match base {
        None => Ok(vec![RowSet {
            label: "all_rows",
            traits,
        }]),
        Some(id) => {
            if !traits.models().iter().any(|m| m == id) {
                return Err(CliError::Domain(format!("base model {id:?} is not in the trait matrix")));
            }
            let without = traits.without(&[id]).map_err(domain)?;
            Ok(vec![
                RowSet {
                    label: "with_base",
                    traits,
                },
                RowSet {
                    label: "without_base",
                    traits: without,
                },
            ])
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "table".into(), |s| s.to_string_lossy().into_owned())
}

fn cmd_correlate(args: CorrelateArgs) -> CliResult {
    let traits = TraitMatrix::from_csv(&read_text(&args.traits)?).map_err(domain)?;
    let sets = row_sets(traits, args.base.as_deref())?;
    let mut tables = Vec::new();
    for path in &args.perf {
        tables.push((file_stem(path), PerformanceTable::from_csv(&read_text(path)?).map_err(domain)?));
    }
    let sep = args.format.sep();
    let mut text = String::new();
    let mut results = Vec::new();
    for (stem, perf) in &tables {
        for set in &sets {
            let matrix = correlation_matrix(&set.traits, perf).map_err(domain)?;
            let n = matrix.first().map_or(0, |c| c[0].n);
            let pairs = if args.pairs {
                let mut fits = Vec::new();
                for d in perf.domains() {
                    fits.extend(paired_trait_sweep(&set.traits, perf, d).map_err(domain)?);
                }
                fits
            } else {
                Vec::new()
            };
            let csv = correlation_csv(perf, &matrix);
            if let Some(dir) = &args.out_dir {
                write_file(&dir.join(format!("correlations_{stem}_{}.csv", set.label)), &csv)?;
                if args.pairs {
                    let lines: String = pairs
                        .iter()
                        .map(|f| serde_json::to_string(f).expect("fit serializes") + "\n")
                        .collect();
                    write_file(&dir.join(format!("pairs_{stem}_{}.jsonl", set.label)), lines)?;
                }
            }
            if args.format == Format::Json {
                let mut cells = BTreeMap::new();
                for (d, row) in perf.domains().iter().zip(&matrix) {
                    let by_trait: BTreeMap<&str, f64> =
                        crate::psychometrics::TraitDim::ALL.iter().map(|t| (t.code(), row[t.index()].r)).collect();
                    cells.insert(d.clone(), by_trait);
                }
                results.push(json!({
                    "table": stem,
                    "rows": set.label,
                    "n": n,
                    "correlations": cells,
                    "pairs": pairs,
                }));
            } else {
                let _ = writeln!(text, "# table={stem} rows={} n={n}", set.label);
                text.push_str(&csv.replace(',', sep));
                if args.pairs {
                    let header = ["domain", "trait_j", "trait_k", "beta0", "beta_j", "beta_k", "rss", "combo_rho", "n"];
                    let _ = writeln!(text, "# pairs table={stem} rows={}", set.label);
                    let _ = writeln!(text, "{}", header.join(sep));
                    for f in &pairs {
                        let cells = [
                            f.domain.clone(),
                            f.trait_j.code().into(),
                            f.trait_k.code().into(),
                            f.beta0.to_string(),
                            f.beta_j.to_string(),
                            f.beta_k.to_string(),
                            f.rss.to_string(),
                            f.combo_rho.to_string(),
                            f.n.to_string(),
                        ];
                        let _ = writeln!(text, "{}", cells.join(sep));
                    }
                }
            }
        }
    }
    if args.format == Format::Json {
        text = to_json(&json!({ "results": results }));
    }
    emit(None, &text)
}

fn cmd_pca(args: PcaArgs) -> CliResult {
    let traits = TraitMatrix::from_csv(&read_text(&args.traits)?).map_err(domain)?;
    let sets = row_sets(traits, args.base.as_deref())?;
    let preps = match args.preprocessing {
        PreprocessingArg::Centered => vec![Preprocessing::Centered],
        PreprocessingArg::Standardized => vec![Preprocessing::Standardized],
        PreprocessingArg::Both => vec![Preprocessing::Centered, Preprocessing::Standardized],
    };
    let mut results: Vec<(String, &RowSet, PcaResult)> = Vec::new();
    for set in &sets {
        for &prep in &preps {
            let result = pca_2d(&set.traits, prep).map_err(domain)?;
            results.push((format!("{}_{}", prep.name(), set.label), set, result));
        }
    }
    let single = results.len() == 1;
    for (tag, set, result) in &results {
        if let Some(dir) = &args.out_dir {
            write_file(&dir.join(format!("pca_{tag}_loadings.csv")), result.loadings_csv())?;
            write_file(&dir.join(format!("pca_{tag}_scores.csv")), result.scores_csv())?;
        }
        if let Some(plot) = &args.plot {
            let path = if single {
                plot.clone()
            } else {
                let stem = file_stem(plot);
                plot.with_file_name(format!("{stem}_{tag}.svg"))
            };
            let ve = &result.variance_explained;
            let scatter = Scatter {
                title: format!("PCA of trait means ({}, {})", result.preprocessing.name(), set.label),
                x_label: format!("PC1 ({:.1}%)", ve[0] * 100.0),
                y_label: format!("PC2 ({:.1}%)", ve[1] * 100.0),
                points: result
                    .models
                    .iter()
                    .zip(&result.scores)
                    .map(|(m, s)| ScatterPoint {
                        x: s[0],
                        y: s[1],
                        label: m.clone(),
                        highlight: args.base.as_deref() == Some(m.as_str()),
                    })
                    .collect(),
            };
            write_file(&path, scatter.to_svg())?;
        }
    }
    let summary: Vec<_> = results
        .iter()
        .map(|(_, set, r)| {
            json!({
                "preprocessing": r.preprocessing,
                "rows": set.label,
                "n": r.models.len(),
                "variance_explained": r.variance_explained,
                "eigenvalues": r.eigenvalues,
                "loadings": r.loadings,
                "scores": r.models.iter().zip(&r.scores).map(|(m, s)| json!({"model": m, "PC1": s[0], "PC2": s[1]})).collect::<Vec<_>>(),
            })
        })
        .collect();
    if let Some(dir) = &args.out_dir {
        write_file(&dir.join("pca_summary.json"), to_json(&json!({ "results": summary })))?;
    }
    let text = match args.format {
        Format::Json => to_json(&json!({ "results": summary })),
        fmt => {
            let sep = fmt.sep();
            let mut t = ["preprocessing", "rows", "n", "PC1", "PC2"].join(sep) + "\n";
            for (_, set, r) in &results {
                let cells = [
                    r.preprocessing.name().to_string(),
                    set.label.to_string(),
                    r.models.len().to_string(),
                    r.variance_explained[0].to_string(),
                    r.variance_explained[1].to_string(),
                ];
                let _ = writeln!(t, "{}", cells.join(sep));
            }
            t
        }
    };
    emit(None, &text)
}

fn manifest_text(manifest: &Manifest, format: Format) -> String {
    match format {
        Format::Json => manifest.to_json(),
        fmt => {
            let value = serde_json::to_value(manifest).expect("manifest serializes");
            let mut t = ["field", "value"].join(fmt.sep()) + "\n";
            for (k, v) in value.as_object().expect("manifest is an object") {
                let v = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = writeln!(t, "{k}{}{v}", fmt.sep());
            }
            t
        }
    }
}

fn cmd_sample(args: SampleArgs) -> CliResult {
    let plan = sampler::plan(args.budget, args.seq_len, args.seed).map_err(domain)?;
    let tokenizer = WhitespaceTokenizer;
    let manifest = match &args.input {
        None => Manifest::for_plan(&plan, sampler::TokenCounter::name(&tokenizer)),
        Some(input) => {
            let dir = args
                .out_dir
                .as_ref()
                .ok_or_else(|| CliError::Usage("--out-dir is required with --input".into()))?;
            let corpus = read_corpus(input).map_err(|e| match e {
                CorpusError::Io { .. } => CliError::Usage(e.to_string()),
                _ => domain(e),
            })?;
            let run = sampler::run(&corpus.files, &corpus.documents, &tokenizer, &plan).map_err(domain)?;
            write_file(&dir.join("chunks.jsonl"), &run.jsonl)?;
            run.manifest
        }
    };
    if let Some(dir) = &args.out_dir {
        write_file(&dir.join("manifest.json"), manifest.to_json())?;
    }
    emit(None, &manifest_text(&manifest, args.format))
}

fn cmd_synth(args: SynthArgs) -> CliResult {
    let mut target: ProfileTarget = serde_json::from_str(&read_text(&args.target)?)
        .map_err(|e| CliError::Usage(format!("bad target: {e}")))?;
    if let Some(seed) = args.seed {
        target.seed = seed;
    }
    let out = generate(
        &target,
        &VerbLexicon::default(),
        &PolarityLexicon::default(),
        &PronounSets::default(),
    )
    .map_err(domain)?;
    let expected = json!({
        "profile": out.expected,
        "sentence_polarities": out.polarities,
        "target": target,
    });
    if let Some(dir) = &args.out_dir {
        write_file(&dir.join("corpus.txt"), &out.text)?;
        write_file(&dir.join("expected.json"), to_json(&expected))?;
    }
    let text = match args.format {
        Format::Json => to_json(&expected),
        Format::Tsv => out.expected.to_tsv(),
        Format::Csv => out.expected.to_tsv().replace('\t', ","),
    };
    emit(None, &text)
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit status. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Profile(a) => cmd_profile(a),
        Command::Score(a) => cmd_score(a),
        Command::Administer(a) => cmd_administer(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Pca(a) => cmd_pca(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
