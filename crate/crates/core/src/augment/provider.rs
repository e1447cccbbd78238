use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::offline::analyze_offline;
use super::prompt::PromptBundle;
use super::response::render;
use crate::extractor::{ImmutableTypes, SourceModel};
use crate::finding::Origin;
use crate::naming::SegmentationLexicon;

/// Settings for the model-assisted check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub endpoint: String,
    #[serde(skip_serializing)]
    pub api_key: String,
    pub model: Option<String>,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
    pub thinking_tokens: Option<u32>,
    pub show_warnings: bool,
    pub enabled: bool,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            endpoint: String::new(),
            api_key: String::new(),
            model: None,
            temperature: 1.0,
            max_tokens: None,
            thinking_tokens: None,
            show_warnings: true,
            enabled: true,
        }
    }
}

impl ProviderConfig {
    /// Model identity used in cache keys: the model name, or the endpoint
    /// when the model is embedded in the URL.
    pub fn model_identity(&self) -> String {
        self.model.clone().unwrap_or_else(|| self.endpoint.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmResponse {
    pub raw_text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    /// Request-to-response wall time, or lookup time when `from_cache`.
    pub latency_seconds: f64,
    pub from_cache: bool,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("authentication rejected (HTTP {0})")]
    Auth(u16),
    #[error("rate limited after {0} attempts")]
    RateLimited(u32),
    #[error("request timed out")]
    Timeout,
    #[error("output truncated at the token limit; findings may be incomplete")]
    TruncatedOutput { partial: String },
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("unexpected response body: {0}")]
    MalformedResponse(String),
    #[error("no replay fixture for '{0}'")]
    MissingFixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ProviderError {
    fn retryable(&self) -> bool {
        matches!(
            self,
            ProviderError::RateLimited(_)
                | ProviderError::Timeout
                | ProviderError::Transport(_)
                | ProviderError::Http { status: 500..=599, .. }
        )
    }
}

/// One file's request.
#[derive(Debug, Clone, Copy)]
pub struct ProviderRequest<'a> {
    /// Path of the source file relative to the run root, `/`-separated.
    pub file_name: &'a str,
    pub source: &'a str,
    pub prompt: &'a PromptBundle,
    pub cache_key: &'a str,
}

pub trait Provider: Send + Sync {
    fn complete(&self, request: &ProviderRequest<'_>) -> Result<LlmResponse, ProviderError>;

    /// Origin tag for findings parsed from this provider's output.
    fn origin(&self) -> Origin {
        Origin::Llm
    }

    /// Whether responses may be stored in the response cache.
    fn cacheable(&self) -> bool {
        true
    }
}

static REMOTE_REQUESTS: AtomicU64 = AtomicU64::new(0);

/// Number of HTTP requests issued by any remote provider in this process.
pub fn remote_request_count() -> u64 {
    REMOTE_REQUESTS.load(Ordering::SeqCst)
}

/// Chat-completions client. Accepts OpenAI-style and Gemini-style bodies.
pub struct RemoteProvider {
    config: ProviderConfig,
    agent: ureq::Agent,
    attempts: u32,
    backoff_base: Duration,
}

impl RemoteProvider {
    pub fn new(config: ProviderConfig) -> Self {
        Self::with_timing(config, Duration::from_secs(300), Duration::from_millis(500))
    }

    pub fn with_timing(config: ProviderConfig, timeout: Duration, backoff_base: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemoteProvider {
            config,
            agent,
            attempts: 3,
            backoff_base,
        }
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        });
        if let Some(model) = &self.config.model {
            body["model"] = json!(model);
        }
        if let Some(n) = self.config.max_tokens {
            body["max_tokens"] = json!(n);
        }
        if let Some(n) = self.config.thinking_tokens {
            body["thinking"] = json!({ "budget_tokens": n });
        }
        body
    }

    fn attempt(&self, body: &Value) -> Result<LlmResponse, ProviderError> {
        REMOTE_REQUESTS.fetch_add(1, Ordering::SeqCst);
        let started = Instant::now();
        let result = self
            .agent
            .post(&self.config.endpoint)
            .header("Authorization", &format!("Bearer {}", self.config.api_key))
            .send_json(body);
        let mut response = match result {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(ProviderError::Timeout),
            Err(ureq::Error::Io(e)) if e.kind() == std::io::ErrorKind::TimedOut => return Err(ProviderError::Timeout),
            Err(e) => return Err(ProviderError::Transport(e.to_string())),
        };
        let status = response.status().as_u16();
        let text = match response.body_mut().read_to_string() {
            Ok(t) => t,
            Err(ureq::Error::Timeout(_)) => return Err(ProviderError::Timeout),
            Err(e) => return Err(ProviderError::Transport(e.to_string())),
        };
        let latency_seconds = started.elapsed().as_secs_f64();
        match status {
            200..=299 => {}
            401 | 403 => return Err(ProviderError::Auth(status)),
            429 => return Err(ProviderError::RateLimited(1)),
            _ => return Err(ProviderError::Http { status, body: text }),
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| ProviderError::MalformedResponse(e.to_string()))?;
        let parsed = parse_completion(&value)?;
        if parsed.truncated {
            return Err(ProviderError::TruncatedOutput { partial: parsed.text });
        }
        Ok(LlmResponse {
            raw_text: parsed.text,
            input_tokens: parsed.input_tokens,
            output_tokens: parsed.output_tokens,
            latency_seconds,
            from_cache: false,
        })
    }
}

impl Provider for RemoteProvider {
    fn complete(&self, request: &ProviderRequest<'_>) -> Result<LlmResponse, ProviderError> {
        let body = self.request_body(&request.prompt.text);
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.attempt(&body) {
                Ok(r) => return Ok(r),
                Err(e) if e.retryable() && attempt < self.attempts => {
                    let delay = self.backoff_base * 2u32.pow(attempt - 1);
                    log::warn!("{}: {e}; retrying in {delay:?}", request.file_name);
                    std::thread::sleep(delay);
                }
                Err(ProviderError::RateLimited(_)) => return Err(ProviderError::RateLimited(attempt)),
                Err(e) => return Err(e),
            }
        }
    }
}

struct Completion {
    text: String,
    input_tokens: u64,
    output_tokens: u64,
    truncated: bool,
}

fn count(v: &Value, key: &str) -> u64 {
    v.get(key).and_then(Value::as_u64).unwrap_or(0)
}

fn parse_completion(v: &Value) -> Result<Completion, ProviderError> {
    if let Some(choice) = v.get("choices").and_then(|c| c.get(0)) {
        let text = choice
            .pointer("/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| ProviderError::MalformedResponse("choices[0].message.content missing".into()))?;
        let usage = v.get("usage").cloned().unwrap_or(Value::Null);
        return Ok(Completion {
            text: text.to_string(),
            input_tokens: count(&usage, "prompt_tokens"),
            output_tokens: count(&usage, "completion_tokens"),
            truncated: choice.get("finish_reason").and_then(Value::as_str) == Some("length"),
        });
    }
    if let Some(cand) = v.get("candidates").and_then(|c| c.get(0)) {
        let text: String = cand
            .pointer("/content/parts")
            .and_then(Value::as_array)
            .map(|parts| {
                parts
                    .iter()
                    .filter_map(|p| p.get("text").and_then(Value::as_str))
                    .collect()
            })
            .unwrap_or_default();
        let usage = v.get("usageMetadata").cloned().unwrap_or(Value::Null);
        return Ok(Completion {
            text,
            input_tokens: count(&usage, "promptTokenCount"),
            output_tokens: count(&usage, "candidatesTokenCount") + count(&usage, "thoughtsTokenCount"),
            truncated: cand.get("finishReason").and_then(Value::as_str) == Some("MAX_TOKENS"),
        });
    }
    Err(ProviderError::MalformedResponse(
        "neither choices nor candidates present".into(),
    ))
}

/// Sidecar metadata for a replay fixture (`<fixture>.meta.json`).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReplayMeta {
    #[serde(default)]
    pub input_tokens: u64,
    #[serde(default)]
    pub output_tokens: u64,
    #[serde(default)]
    pub finish_reason: Option<String>,
}

/// Serves recorded responses from a directory.
///
/// For a file `a/B.java` requested for the k-th time (1-based) it tries
/// `a__B.java.k.txt`, `<cache key>.txt`, then `a__B.java.txt`.
pub struct ReplayProvider {
    dir: PathBuf,
    calls: Mutex<HashMap<String, usize>>,
}

impl ReplayProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayProvider {
            dir: dir.into(),
            calls: Mutex::new(HashMap::new()),
        }
    }

    pub fn fixture_stem(file_name: &str) -> String {
        file_name.replace(['/', '\\'], "__")
    }

    fn find(&self, request: &ProviderRequest<'_>) -> Option<PathBuf> {
        let stem = Self::fixture_stem(request.file_name);
        let k = {
            let mut calls = self.calls.lock().expect("replay counter");
            let n = calls.entry(stem.clone()).or_insert(0);
            *n += 1;
            *n
        };
        [
            format!("{stem}.{k}.txt"),
            format!("{}.txt", request.cache_key),
            format!("{stem}.txt"),
        ]
        .into_iter()
        .map(|name| self.dir.join(name))
        .find(|p| p.is_file())
    }
}

fn meta_path(fixture: &Path) -> PathBuf {
    fixture.with_extension("meta.json")
}

impl Provider for ReplayProvider {
    fn complete(&self, request: &ProviderRequest<'_>) -> Result<LlmResponse, ProviderError> {
        let started = Instant::now();
        let path = self
            .find(request)
            .ok_or_else(|| ProviderError::MissingFixture(request.file_name.to_string()))?;
        let raw_text = std::fs::read_to_string(&path)?;
        let meta_file = meta_path(&path);
        let meta: ReplayMeta = if meta_file.is_file() {
            serde_json::from_str(&std::fs::read_to_string(&meta_file)?)
                .map_err(|e| ProviderError::MalformedResponse(format!("{}: {e}", meta_file.display())))?
        } else {
            ReplayMeta::default()
        };
        if matches!(meta.finish_reason.as_deref(), Some("length" | "MAX_TOKENS")) {
            return Err(ProviderError::TruncatedOutput { partial: raw_text });
        }
        Ok(LlmResponse {
            raw_text,
            input_tokens: meta.input_tokens,
            output_tokens: meta.output_tokens,
            latency_seconds: started.elapsed().as_secs_f64(),
            from_cache: false,
        })
    }
}

/// Runs the deterministic analyzer and renders its findings in the response
/// grammar, so both paths share one parser.
pub struct OfflineProvider {
    lexicon: Arc<SegmentationLexicon>,
    allowlist: Arc<ImmutableTypes>,
}

impl OfflineProvider {
    pub fn new(lexicon: Arc<SegmentationLexicon>, allowlist: Arc<ImmutableTypes>) -> Self {
        OfflineProvider { lexicon, allowlist }
    }
}

impl Provider for OfflineProvider {
    fn complete(&self, request: &ProviderRequest<'_>) -> Result<LlmResponse, ProviderError> {
        let started = Instant::now();
        let model = SourceModel::parse(request.source, &self.allowlist);
        let lines: Vec<String> = analyze_offline(&model, &self.lexicon).iter().map(render).collect();
        let raw_text = if lines.is_empty() {
            " ".to_string()
        } else {
            lines.join("\n")
        };
        Ok(LlmResponse {
            raw_text,
            input_tokens: 0,
            output_tokens: 0,
            latency_seconds: started.elapsed().as_secs_f64(),
            from_cache: false,
        })
    }

    fn origin(&self) -> Origin {
        Origin::Offline
    }

    fn cacheable(&self) -> bool {
        false
    }
}

/// Counts calls to a wrapped provider.
pub struct SpyProvider<P> {
    inner: P,
    calls: AtomicUsize,
}

impl<P: Provider> SpyProvider<P> {
    pub fn new(inner: P) -> Self {
        SpyProvider {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<P: Provider> Provider for SpyProvider<P> {
    fn complete(&self, request: &ProviderRequest<'_>) -> Result<LlmResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(request)
    }

    fn origin(&self) -> Origin {
        self.inner.origin()
    }

    fn cacheable(&self) -> bool {
        self.inner.cacheable()
    }
}

impl<P: Provider + ?Sized> Provider for Arc<P> {
    fn complete(&self, request: &ProviderRequest<'_>) -> Result<LlmResponse, ProviderError> {
        (**self).complete(request)
    }

    fn origin(&self) -> Origin {
        (**self).origin()
    }

    fn cacheable(&self) -> bool {
        (**self).cacheable()
    }
}

/// Counting semaphore bounding concurrent provider calls.
pub struct InFlightLimiter {
    max: usize,
    active: Mutex<usize>,
    freed: Condvar,
}

pub struct InFlightPermit<'a> {
    limiter: &'a InFlightLimiter,
}

impl InFlightLimiter {
    pub fn new(max: usize) -> Self {
        InFlightLimiter {
            max: max.max(1),
            active: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    pub fn acquire(&self) -> InFlightPermit<'_> {
        let mut active = self.active.lock().expect("limiter lock");
        while *active >= self.max {
            active = self.freed.wait(active).expect("limiter lock");
        }
        *active += 1;
        InFlightPermit { limiter: self }
    }
}

impl Drop for InFlightPermit<'_> {
    fn drop(&mut self) {
        *self.limiter.active.lock().expect("limiter lock") -= 1;
        self.limiter.freed.notify_one();
    }
}
