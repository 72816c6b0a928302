//! Administering an inventory to a model behind an OpenAI-compatible
//! chat-completions endpoint.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::sha256_hex;
use crate::psychometrics::{parse_choice, Inventory, MpiItem, MpiResponse, Outcome, ResponseRecord};
use crate::rng::SeededRng;

pub const STATEMENT_PLACEHOLDER: &str = "{statement}";

/// A reimplementation of the usual multiple-choice framing; override it
/// with `--template` to match a specific protocol.
pub const DEFAULT_TEMPLATE: &str = "Given a statement of you: \"{statement}.\"
Please choose from the following options to identify how accurately this statement describes you.
Options:
(A) Very Accurate
(B) Moderately Accurate
(C) Neither Accurate Nor Inaccurate
(D) Moderately Inaccurate
(E) Very Inaccurate

Answer:";

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("template has no {STATEMENT_PLACEHOLDER} placeholder")]
    BadTemplate,
    #[error("invalid endpoint configuration: {0}")]
    ConfigInvalid(String),
    #[error("every request failed; first error: {first_error}")]
    AllRequestsFailed {
        first_error: String,
        run: Box<AdministrationRun>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub max_retries: u32,
    pub concurrency: usize,
    pub timeout_secs: f64,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
    /// Seeds the backoff jitter.
    pub seed: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: String::new(),
            api_key_env: "OPENAI_API_KEY".into(),
            temperature: 0.0,
            max_tokens: 32,
            max_retries: 3,
            concurrency: 4,
            timeout_secs: 60.0,
            backoff_base_ms: 500,
            backoff_max_ms: 8_000,
            seed: 0,
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<(), ClientError> {
        let bad = |m: &str| Err(ClientError::ConfigInvalid(m.into()));
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return bad("base_url must start with http:// or https://");
        }
        if self.model.trim().is_empty() {
            return bad("model is empty");
        }
        if self.api_key_env.trim().is_empty() {
            return bad("api_key_env is empty");
        }
        if self.concurrency < 1 {
            return bad("concurrency must be at least 1");
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return bad("timeout must be positive");
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad("temperature must lie in [0, 2]");
        }
        Ok(())
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    /// Delay before retry number `retry` (1-based) of item `index`:
    /// `min(max, base * 2^(retry-1))` scaled by a seeded jitter in `[0.5, 1]`.
    pub fn backoff(&self, index: usize, retry: u32) -> Duration {
        let exp = self.backoff_base_ms.saturating_mul(1u64 << (retry - 1).min(30));
        let capped = exp.min(self.backoff_max_ms);
        let mut rng = SeededRng::new(self.seed ^ ((index as u64) << 8) ^ u64::from(retry));
        let jitter = 0.5 + 0.5 * rng.unit();
        Duration::from_millis((capped as f64 * jitter).round() as u64)
    }
}

pub fn render_prompt(item: &MpiItem, template: &str) -> Result<String, ClientError> {
    if !template.contains(STATEMENT_PLACEHOLDER) {
        return Err(ClientError::BadTemplate);
    }
    let statement = item.statement.trim().trim_end_matches('.');
    Ok(template.replace(STATEMENT_PLACEHOLDER, statement))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub attempt: u32,
    pub started_at: String,
    pub finished_at: String,
    pub status: Option<u16>,
    pub error: Option<String>,
    /// Wait before the next attempt, if one follows.
    pub backoff_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub index: usize,
    pub item_id: String,
    pub prompt: String,
    pub attempts: Vec<Attempt>,
    pub completion: Option<String>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdministrationRun {
    pub inventory_digest: String,
    pub template_sha256: String,
    pub config: EndpointConfig,
    pub responses: Vec<MpiResponse>,
    pub transcript: Vec<TranscriptEntry>,
}

impl AdministrationRun {
    /// The JSON-lines records that `score` reads back.
    pub fn response_records(&self) -> Vec<ResponseRecord> {
        self.responses
            .iter()
            .zip(&self.transcript)
            .map(|(r, t)| ResponseRecord::from_response(r, t.completion.clone().unwrap_or_default()))
            .collect()
    }

    pub fn transport_failures(&self) -> usize {
        self.transcript.iter().filter(|t| t.completion.is_none()).count()
    }
}

/// One HTTP exchange. `Err` carries the message and whether a retry may help.
pub trait Transport: Sync {
    fn complete(&self, prompt: &str) -> Result<String, (String, Option<u16>, bool)>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    authorization: String,
}

impl HttpTransport {
    pub fn new(config: &EndpointConfig, api_key: &str) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpTransport {
            agent,
            url: config.endpoint(),
            model: config.model.clone(),
            temperature: config.temperature,
            max_tokens: config.max_tokens,
            authorization: format!("Bearer {api_key}"),
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

/// First choice's message content from a chat-completions body.
pub fn completion_text(body: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(body).ok()?;
    value["choices"][0]["message"]["content"].as_str().map(str::to_string)
}

impl Transport for HttpTransport {
    fn complete(&self, prompt: &str) -> Result<String, (String, Option<u16>, bool)> {
        let request = ChatRequest {
            model: &self.model,
            messages: [ChatMessage {
                role: "user",
                content: prompt,
            }],
            temperature: self.temperature,
            max_tokens: self.max_tokens,
        };
        let mut response = self
            .agent
            .post(&self.url)
            .header("Authorization", &self.authorization)
            .send_json(&request)
            .map_err(|e| (format!("transport: {e}"), None, true))?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_string().unwrap_or_default();
        if status == 200 {
            return completion_text(&body).ok_or_else(|| ("malformed completion body".to_string(), Some(200), false));
        }
        let retryable = status == 429 || status >= 500;
        Err((format!("HTTP {status}"), Some(status), retryable))
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn redact(text: &str, secret: &str) -> String {
    if secret.is_empty() {
        text.to_string()
    } else {
        text.replace(secret, "[redacted]")
    }
}

fn administer_item(
    index: usize,
    item: &MpiItem,
    prompt: String,
    config: &EndpointConfig,
    transport: &dyn Transport,
    secret: &str,
) -> TranscriptEntry {
    let mut attempts = Vec::new();
    let mut completion = None;
    let mut last_error = String::new();
    let total = config.max_retries + 1;
    for attempt in 1..=total {
        let started_at = now();
        let result = transport.complete(&prompt);
        let finished_at = now();
        match result {
            Ok(text) => {
                attempts.push(Attempt {
                    attempt,
                    started_at,
                    finished_at,
                    status: Some(200),
                    error: None,
                    backoff_ms: None,
                });
                completion = Some(redact(&text, secret));
                break;
            }
            Err((message, status, retryable)) => {
                last_error = redact(&message, secret);
                let wait = (retryable && attempt < total).then(|| config.backoff(index, attempt));
                attempts.push(Attempt {
                    attempt,
                    started_at,
                    finished_at,
                    status,
                    error: Some(last_error.clone()),
                    backoff_ms: wait.map(|w| w.as_millis() as u64),
                });
                match wait {
                    Some(w) => thread::sleep(w),
                    None => break,
                }
            }
        }
    }
    let outcome = match &completion {
        Some(text) => parse_choice(text),
        None => Outcome::Unparsed(format!("request failed after {} attempt(s): {last_error}", attempts.len())),
    };
    TranscriptEntry {
        index,
        item_id: item.id.clone(),
        prompt,
        attempts,
        completion,
        outcome,
    }
}

/// Sends one request per item through `transport`, at most
/// `config.concurrency` at a time, and returns results in item order.
pub fn administer_with(
    inventory: &Inventory,
    config: &EndpointConfig,
    template: &str,
    transport: &dyn Transport,
    secret: &str,
) -> Result<AdministrationRun, ClientError> {
    config.validate()?;
    let prompts = inventory
        .items()
        .iter()
        .map(|item| render_prompt(item, template))
        .collect::<Result<Vec<_>, _>>()?;
    let items = inventory.items();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let workers = config.concurrency.min(items.len()).max(1);
    thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, prompts) = (&next, &prompts);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let entry = administer_item(i, &items[i], prompts[i].clone(), config, transport, secret);
                if tx.send(entry).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut transcript: Vec<TranscriptEntry> = rx.into_iter().collect();
    transcript.sort_by_key(|t| t.index);
    let responses = transcript
        .iter()
        .map(|t| MpiResponse {
            item_id: t.item_id.clone(),
            outcome: t.outcome.clone(),
        })
        .collect();
    let run = AdministrationRun {
        inventory_digest: inventory.digest(),
        template_sha256: sha256_hex(template.as_bytes()),
        config: config.clone(),
        responses,
        transcript,
    };
    if !items.is_empty() && run.transport_failures() == items.len() {
        let first_error = match &run.transcript[0].outcome {
            Outcome::Unparsed(e) => e.clone(),
            Outcome::Choice(_) => String::new(),
        };
        return Err(ClientError::AllRequestsFailed {
            first_error,
            run: Box::new(run),
        });
    }
    Ok(run)
}

/// Reads the key from `config.api_key_env` and administers over HTTP.
pub fn administer(inventory: &Inventory, config: &EndpointConfig, template: &str) -> Result<AdministrationRun, ClientError> {
    config.validate()?;
    let key = std::env::var(&config.api_key_env)
        .map_err(|_| ClientError::ConfigInvalid(format!("environment variable {} is not set", config.api_key_env)))?;
    let transport = HttpTransport::new(config, &key);
    administer_with(inventory, config, template, &transport, &key)
}
