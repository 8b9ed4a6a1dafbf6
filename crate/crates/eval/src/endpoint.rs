//! HTTP client for a model server.
//!
//! Each sample is one `POST` to the configured URL with a JSON body:
//!
//! ```json
//! {
//!   "model": "name",                 // only when configured
//!   "messages": [{
//!     "role": "user",
//!     "content": [
//!       {"type": "image", "media_type": "image/png", "data": "<base64>"},
//!       {"type": "text", "text": "<instruction prompt>"}
//!     ]
//!   }],
//!   "anchor_text": "<text layer>"    // only under with_metadata
//! }
//! ```
//!
//! The prompt is chosen by the sample's supervision mode. With
//! `token_env` set, the named environment variable is sent as
//! `Authorization: Bearer <value>`.
//!
//! The server answers `200` with `{"text": "<page transcription>"}`.
//!
//! Connection failures, timeouts, `429` and `5xx` responses are retried
//! with exponential backoff (`backoff_ms`, doubled per attempt). If the
//! server still cannot be reached the run stops with `EndpointUnreachable`.
//! A server that keeps answering with an error status, or answers with a
//! body of the wrong shape, only costs that sample: it is scored as an
//! empty prediction and flagged.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use base64::Engine;
use ocrkit_core::corpus::{CorpusManifest, ManifestEntry};
use ocrkit_core::curation::cap_anchor_text;
use ocrkit_core::docmodel::SupervisionMode;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{EvalError, Result};
use crate::predict::{ConditionKind, EvalCondition, PredictionFlag, PredictionSet, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub url: String,
    #[serde(default)]
    pub model: Option<String>,
    /// Environment variable holding a bearer token.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    /// Extra attempts after the first.
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    /// Requests in flight at once.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub prompt_default: Option<PathBuf>,
    #[serde(default)]
    pub prompt_structure: Option<PathBuf>,
}

fn default_timeout() -> u64 {
    120
}

fn default_retries() -> u32 {
    3
}

fn default_backoff() -> u64 {
    500
}

fn default_window() -> usize {
    4
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            model: None,
            token_env: None,
            timeout_secs: default_timeout(),
            retries: default_retries(),
            backoff_ms: default_backoff(),
            window: default_window(),
            prompt_default: None,
            prompt_structure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompts {
    pub default: String,
    pub structure: String,
}

impl Prompts {
    pub fn builtin() -> Self {
        Self {
            default: include_str!("../prompts/default.txt").to_string(),
            structure: include_str!("../prompts/structure.txt").to_string(),
        }
    }

    pub fn for_mode(&self, mode: SupervisionMode) -> &str {
        match mode {
            SupervisionMode::Default => &self.default,
            SupervisionMode::Structure => &self.structure,
        }
    }
}

/// A configured endpoint with its prompts resolved.
#[derive(Debug, Clone)]
pub struct Endpoint {
    pub config: EndpointConfig,
    pub prompts: Prompts,
}

impl Endpoint {
    /// Reads prompt overrides, relative to `base`, falling back to the
    /// built-in prompts.
    pub fn from_config(config: EndpointConfig, base: &Path) -> Result<Self> {
        if config.window == 0 {
            return Err(EvalError::Config("endpoint window must be at least 1".into()));
        }
        let mut prompts = Prompts::builtin();
        for (slot, path) in [
            (&mut prompts.default, &config.prompt_default),
            (&mut prompts.structure, &config.prompt_structure),
        ] {
            if let Some(p) = path {
                let p = base.join(p);
                *slot = std::fs::read_to_string(&p).map_err(|e| EvalError::io(&p, e))?;
            }
        }
        Ok(Self { config, prompts })
    }
}

/// Request body for one sample, per the module docs.
pub fn request_body(
    entry: &ManifestEntry,
    root: &Path,
    prompts: &Prompts,
    model: Option<&str>,
    condition: &EvalCondition,
) -> Result<Value> {
    let image_path = root.join(&entry.image_path);
    let bytes = std::fs::read(&image_path).map_err(|e| EvalError::io(&image_path, e))?;
    let mut body = json!({
        "messages": [{
            "role": "user",
            "content": [
                {
                    "type": "image",
                    "media_type": "image/png",
                    "data": base64::engine::general_purpose::STANDARD.encode(bytes),
                },
                {"type": "text", "text": prompts.for_mode(entry.mode)},
            ],
        }],
    });
    if let Some(m) = model {
        body["model"] = json!(m);
    }
    if condition.kind == ConditionKind::WithMetadata {
        let rel = entry
            .anchor_path
            .as_ref()
            .ok_or_else(|| EvalError::MissingAnchor { id: entry.id.clone() })?;
        let path = root.join(rel);
        let anchor = std::fs::read_to_string(&path).map_err(|e| EvalError::io(&path, e))?;
        body["anchor_text"] = json!(cap_anchor_text(&anchor, condition.anchor_cap));
    }
    Ok(body)
}

enum Outcome {
    Text(String),
    Flag(PredictionFlag),
}

fn is_transient(status: u16) -> bool {
    status == 429 || status >= 500
}

fn call(agent: &ureq::Agent, cfg: &EndpointConfig, token: Option<&str>, body: &Value) -> Result<Outcome> {
    let attempts = cfg.retries + 1;
    let mut last = String::new();
    let mut last_was_transport = true;
    for attempt in 0..attempts {
        if attempt > 0 {
            let wait = cfg.backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
            std::thread::sleep(Duration::from_millis(wait));
        }
        let mut req = agent.post(&cfg.url).set("Content-Type", "application/json");
        if let Some(t) = token {
            req = req.set("Authorization", &format!("Bearer {t}"));
        }
        match req.send_string(&body.to_string()) {
            Ok(resp) => {
                let text = match resp.into_string() {
                    Ok(t) => t,
                    Err(e) => {
                        last = e.to_string();
                        last_was_transport = true;
                        continue;
                    }
                };
                return Ok(match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(map)) => match map.get("text") {
                        Some(Value::String(s)) => Outcome::Text(s.clone()),
                        _ => Outcome::Flag(PredictionFlag::MalformedResponse("no string field `text`".into())),
                    },
                    Ok(_) => Outcome::Flag(PredictionFlag::MalformedResponse("body is not an object".into())),
                    Err(e) => Outcome::Flag(PredictionFlag::MalformedResponse(e.to_string())),
                });
            }
            Err(ureq::Error::Status(code, _)) if is_transient(code) => {
                last = format!("HTTP {code}");
                last_was_transport = false;
            }
            Err(ureq::Error::Status(code, _)) => {
                return Ok(Outcome::Flag(PredictionFlag::RequestFailed(format!("HTTP {code}"))));
            }
            Err(ureq::Error::Transport(t)) => {
                last = t.to_string();
                last_was_transport = true;
            }
        }
    }
    if last_was_transport {
        Err(EvalError::EndpointUnreachable {
            url: cfg.url.clone(),
            attempts,
            reason: last,
        })
    } else {
        Ok(Outcome::Flag(PredictionFlag::RequestFailed(last)))
    }
}

pub(crate) fn fetch_from_endpoint(
    manifest: &CorpusManifest,
    root: &Path,
    ep: &Endpoint,
    condition: &EvalCondition,
) -> Result<PredictionSet> {
    let cfg = &ep.config;
    let token = match &cfg.token_env {
        Some(var) => Some(
            std::env::var(var).map_err(|_| EvalError::Config(format!("environment variable {var} is not set")))?,
        ),
        None => None,
    };
    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(cfg.timeout_secs.max(1)))
        .build();
    let entries: Vec<&ManifestEntry> = manifest.ok_entries().collect();
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let results: Mutex<Vec<Option<Outcome>>> = Mutex::new((0..entries.len()).map(|_| None).collect());
    let failure: Mutex<Option<EvalError>> = Mutex::new(None);

    std::thread::scope(|s| {
        for _ in 0..cfg.window.min(entries.len()).max(1) {
            s.spawn(|| loop {
                if stop.load(Ordering::SeqCst) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(entry) = entries.get(i) else { return };
                let out = request_body(entry, root, &ep.prompts, cfg.model.as_deref(), condition)
                    .and_then(|body| call(&agent, cfg, token.as_deref(), &body));
                match out {
                    Ok(o) => results.lock().expect("results lock")[i] = Some(o),
                    Err(e) => {
                        stop.store(true, Ordering::SeqCst);
                        failure.lock().expect("failure lock").get_or_insert(e);
                        return;
                    }
                }
            });
        }
    });

    if let Some(e) = failure.into_inner().expect("failure lock") {
        return Err(e);
    }
    let mut set = PredictionSet {
        texts: BTreeMap::new(),
        flags: BTreeMap::new(),
        provenance: Provenance::Endpoint,
        endpoint: Some(cfg.url.clone()),
    };
    for (entry, out) in entries.iter().zip(results.into_inner().expect("results lock")) {
        let text = match out.expect("every sample was fetched") {
            Outcome::Text(t) => t,
            Outcome::Flag(f) => {
                set.flags.insert(entry.id.clone(), f);
                String::new()
            }
        };
        set.texts.insert(entry.id.clone(), text);
    }
    Ok(set)
}
