//! Adapter for an out-of-process reasoner speaking JSON.
//!
//! Requests and responses are plain JSON objects. A [`ReplayTransport`]
//! serves recorded pairs so tests never need a live model.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::characterize::characterize_rule_based;
use super::memory::EpisodeMemory;
use super::planner::{
    ground_path, plan_rule, validate_community_path, GlobalPath, PlanOutcome, PlanningContext,
};
use super::schema::EnvCharacterization;
use super::{PlanError, SlowError};
use crate::community::CommunityId;

#[derive(Debug, thiserror::Error)]
pub enum TransportError {
    #[error("no recorded response for request")]
    NoRecording,
    #[error("transport failed: {0}")]
    Failed(String),
}

/// One request/response round trip.
pub trait Transport {
    fn exchange(&mut self, request: &Value) -> Result<Value, TransportError>;
}

/// A recorded exchange, one per line in fixture files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: Value,
    pub response: Value,
}

/// Serves responses from recorded exchanges, matching requests verbatim.
#[derive(Clone, Debug, Default)]
pub struct ReplayTransport {
    exchanges: Vec<Exchange>,
}

impl ReplayTransport {
    pub fn new(exchanges: Vec<Exchange>) -> Self {
        Self { exchanges }
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let exchanges = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Self { exchanges })
    }
}

impl Transport for ReplayTransport {
    fn exchange(&mut self, request: &Value) -> Result<Value, TransportError> {
        self.exchanges
            .iter()
            .find(|e| &e.request == request)
            .map(|e| e.response.clone())
            .ok_or(TransportError::NoRecording)
    }
}

/// Wraps a transport and keeps every successful exchange.
pub struct RecordingTransport<T> {
    inner: T,
    pub recorded: Vec<Exchange>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T) -> Self {
        Self {
            inner,
            recorded: Vec::new(),
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.recorded {
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string(e).expect("json values serialize")
            );
        }
        out
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn exchange(&mut self, request: &Value) -> Result<Value, TransportError> {
        let response = self.inner.exchange(request)?;
        self.recorded.push(Exchange {
            request: request.clone(),
            response: response.clone(),
        });
        Ok(response)
    }
}

/// POSTs each request to an endpoint with a hard timeout.
#[cfg(feature = "http")]
pub struct HttpTransport {
    endpoint: String,
    agent: ureq::Agent,
}

#[cfg(feature = "http")]
impl HttpTransport {
    pub const DEFAULT_TIMEOUT: std::time::Duration = std::time::Duration::from_secs(10);

    pub fn new(endpoint: impl Into<String>, timeout: std::time::Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            endpoint: endpoint.into(),
            agent,
        }
    }
}

#[cfg(feature = "http")]
impl Transport for HttpTransport {
    fn exchange(&mut self, request: &Value) -> Result<Value, TransportError> {
        self.agent
            .post(&self.endpoint)
            .send_json(request)
            .and_then(|mut r| r.body_mut().read_json::<Value>())
            .map_err(|e| TransportError::Failed(e.to_string()))
    }
}

/// Which global reasoner answers planning and characterization requests.
pub enum Reasoner {
    Rule,
    External(Box<dyn Transport + Send>),
}

impl std::fmt::Debug for Reasoner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reasoner::Rule => f.write_str("Rule"),
            Reasoner::External(_) => f.write_str("External"),
        }
    }
}

/// A result plus the reason the rule-based fallback fired, if it did.
#[derive(Clone, Debug, PartialEq)]
pub struct Reasoned<T> {
    pub value: T,
    pub fallback: Option<String>,
}

pub fn characterize_request(description: &str) -> Value {
    json!({ "task": "characterize", "description": description })
}

pub fn characterize(
    description: &str,
    reasoner: &mut Reasoner,
) -> Result<Reasoned<EnvCharacterization>, SlowError> {
    if description.trim().is_empty() {
        return Err(SlowError::EmptyDescription);
    }
    let fallback = match reasoner {
        Reasoner::Rule => None,
        Reasoner::External(t) => match t.exchange(&characterize_request(description)) {
            Ok(resp) => match serde_json::from_value::<EnvCharacterization>(resp) {
                Ok(value) => {
                    return Ok(Reasoned {
                        value,
                        fallback: None,
                    })
                }
                Err(e) => Some(format!("schema validation failed: {e}")),
            },
            Err(e) => Some(e.to_string()),
        },
    };
    Ok(Reasoned {
        value: characterize_rule_based(description),
        fallback,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanResponse {
    /// Community ids from the robot's community to the target.
    pub waypoints: Vec<CommunityId>,
    #[serde(default)]
    pub rationale: String,
}

pub fn plan_request(ctx: &PlanningContext) -> Result<Value, PlanError> {
    Ok(json!({
        "task": "plan",
        "graph": ctx.global.dump(),
        "strategy": ctx.strategy,
        "memory": memory_value(ctx.memory, ctx),
        "current_node": ctx.current_community()?,
    }))
}

fn memory_value(memory: &EpisodeMemory, ctx: &PlanningContext) -> Value {
    serde_json::to_value(memory.summary(ctx.global)).expect("summary serializes")
}

fn plan_external(
    ctx: &PlanningContext,
    transport: &mut dyn Transport,
) -> Result<GlobalPath, String> {
    let request = plan_request(ctx).map_err(|e| e.to_string())?;
    let response = transport.exchange(&request).map_err(|e| e.to_string())?;
    let parsed: PlanResponse =
        serde_json::from_value(response).map_err(|e| format!("schema validation failed: {e}"))?;
    let terminal = validate_community_path(ctx, &parsed.waypoints).map_err(|e| e.to_string())?;
    ground_path(ctx, parsed.waypoints, terminal, parsed.rationale).map_err(|e| e.to_string())
}

/// One reasoning call; invalid external answers fall back to the rule reasoner.
pub fn plan_global_path(
    ctx: &PlanningContext,
    reasoner: &mut Reasoner,
) -> Result<Reasoned<PlanOutcome>, PlanError> {
    let fallback = match reasoner {
        Reasoner::Rule => None,
        Reasoner::External(t) => {
            // Nothing to ask about once every target is gone.
            let rule = plan_rule(ctx)?;
            if rule == PlanOutcome::ExplorationComplete {
                return Ok(Reasoned {
                    value: rule,
                    fallback: None,
                });
            }
            match plan_external(ctx, t.as_mut()) {
                Ok(path) => {
                    return Ok(Reasoned {
                        value: PlanOutcome::Path(path),
                        fallback: None,
                    })
                }
                Err(reason) => Some(reason),
            }
        }
    };
    Ok(Reasoned {
        value: plan_rule(ctx)?,
        fallback,
    })
}
