use std::collections::HashMap;
use std::path::Path;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::io::{self, IoError};

/// Sampling parameters forwarded to the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 0.7,
            max_tokens: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    Decode(String),
}

impl GenerationError {
    /// Transport failures, 429 and 5xx are worth another attempt.
    pub fn is_retryable(&self) -> bool {
        match self {
            GenerationError::Transport(_) => true,
            GenerationError::Status { status, .. } => *status == 429 || *status >= 500,
            GenerationError::Decode(_) => false,
        }
    }
}

/// Text generator behind the question-synthesis step.
pub trait GenerationClient: Send + Sync {
    fn generate(&self, prompt: &str, params: &GenerationParams) -> Result<String, GenerationError>;

    /// Short description recorded in manifests (never includes credentials).
    fn describe(&self) -> String;
}

/// Bounded retry schedule with exponential backoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    /// Per-request timeout.
    pub timeout_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_backoff_ms: 250,
            max_backoff_ms: 4_000,
            timeout_ms: 60_000,
        }
    }
}

impl RetryPolicy {
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self
            .initial_backoff_ms
            .saturating_mul(1u64 << attempt.min(20))
            .min(self.max_backoff_ms);
        Duration::from_millis(ms)
    }

    /// Upper bound on time spent sleeping between attempts.
    pub fn max_total_backoff(&self) -> Duration {
        (0..self.max_retries).map(|a| self.backoff(a)).sum()
    }

    /// Runs `op` until it succeeds, fails with a non-retryable error, or the
    /// retry budget is spent.
    pub fn run<T>(&self, mut op: impl FnMut() -> Result<T, GenerationError>) -> Result<T, GenerationError> {
        let mut attempt = 0;
        loop {
            match op() {
                Ok(v) => return Ok(v),
                Err(e) if e.is_retryable() && attempt < self.max_retries => {
                    log::warn!("generation attempt {} failed: {e}; retrying", attempt + 1);
                    thread::sleep(self.backoff(attempt));
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[derive(Serialize)]
struct GenerateRequest<'a> {
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
}

#[derive(Deserialize)]
struct GenerateResponse {
    text: String,
}

/// JSON-over-HTTP client: `POST {"prompt","max_tokens","temperature"}` → `{"text"}`.
pub struct HttpClient {
    url: String,
    token: Option<String>,
    agent: ureq::Agent,
    retry: RetryPolicy,
}

impl HttpClient {
    pub fn new(url: impl Into<String>, token: Option<String>, retry: RetryPolicy) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(retry.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpClient {
            url: url.into(),
            token,
            agent,
            retry,
        }
    }

    fn attempt(&self, prompt: &str, params: &GenerationParams) -> Result<String, GenerationError> {
        let body = GenerateRequest {
            prompt,
            max_tokens: params.max_tokens,
            temperature: params.temperature,
        };
        let mut req = self.agent.post(&self.url);
        if let Some(t) = &self.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req
            .send_json(&body)
            .map_err(|e| GenerationError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(GenerationError::Status { status, body });
        }
        let parsed: GenerateResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| GenerationError::Decode(e.to_string()))?;
        Ok(parsed.text)
    }
}

impl GenerationClient for HttpClient {
    fn generate(&self, prompt: &str, params: &GenerationParams) -> Result<String, GenerationError> {
        self.retry.run(|| self.attempt(prompt, params))
    }

    fn describe(&self) -> String {
        format!("http:{}", self.url)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CannedResponse {
    /// SHA-256 (hex) of the full prompt text.
    pub digest: String,
    pub text: String,
}

/// Offline client answering from canned responses keyed by prompt digest.
/// Prompts without a canned response generate an empty string.
#[derive(Debug, Clone, Default)]
pub struct MockClient {
    responses: HashMap<String, String>,
}

impl MockClient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let mut m = MockClient::new();
        for c in io::read_jsonl::<CannedResponse>(path)? {
            m.responses.insert(c.digest, c.text);
        }
        Ok(m)
    }

    pub fn insert_prompt(&mut self, prompt: &str, text: impl Into<String>) {
        self.responses.insert(io::sha256_hex(prompt.as_bytes()), text.into());
    }

    /// Registers the response for the question prompt built from source sentence `x`.
    pub fn insert_for_input(&mut self, x: &str, text: impl Into<String>) {
        self.insert_prompt(&super::make_question_prompt(x), text);
    }

    pub fn canned(&self) -> Vec<CannedResponse> {
        let mut v: Vec<_> = self
            .responses
            .iter()
            .map(|(d, t)| CannedResponse {
                digest: d.clone(),
                text: t.clone(),
            })
            .collect();
        v.sort_by(|a, b| a.digest.cmp(&b.digest));
        v
    }
}

impl GenerationClient for MockClient {
    fn generate(&self, prompt: &str, _params: &GenerationParams) -> Result<String, GenerationError> {
        Ok(self
            .responses
            .get(&io::sha256_hex(prompt.as_bytes()))
            .cloned()
            .unwrap_or_default())
    }

    fn describe(&self) -> String {
        format!("mock:{} responses", self.responses.len())
    }
}
