//! Chat-completion backend abstraction.
//!
//! Two implementations: an OpenAI-compatible HTTP client for real runs and
//! a deterministic rule-table mock that makes the whole pipeline testable
//! offline. Backends are shareable across concurrent in-flight requests.

mod http;
mod mock;

pub use http::HttpBackend;
pub use mock::{default_rules, MockBackend, MockRule};

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::model::TokenUsage;

/// Message role in a chat conversation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

/// One turn of a chat conversation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

/// Reasoning-effort hint passed through to models that support it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReasoningEffort {
    Low,
    Medium,
    High,
}

/// Connection and sampling settings for a chat backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning_effort: Option<ReasoningEffort>,
    pub max_retries: u32,
    pub timeout: Duration,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-5-mini".into(),
            temperature: 1.0,
            top_p: 1.0,
            reasoning_effort: Some(ReasoningEffort::Low),
            max_retries: 3,
            timeout: Duration::from_secs(120),
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), BackendError> {
        if self.temperature < 0.0 {
            return Err(BackendError::Config(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(BackendError::Config(format!(
                "top_p must be in (0, 1], got {}",
                self.top_p
            )));
        }
        if self.model.is_empty() {
            return Err(BackendError::Config("model must be non-empty".into()));
        }
        Ok(())
    }
}

/// Assistant reply plus its token accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub usage: TokenUsage,
}

/// A chat-completion backend. Implementations keep per-request state only,
/// so one instance serves concurrent callers.
pub trait ChatBackend: Send + Sync {
    /// Runs one completion. `messages` must be non-empty and end with a
    /// user turn.
    fn complete(&self, messages: &[ChatMessage]) -> Result<Completion, BackendError>;

    /// Model identifier, used in cache keys.
    fn model(&self) -> &str;
}

pub(crate) fn check_conversation(messages: &[ChatMessage]) -> Result<(), BackendError> {
    match messages.last() {
        None => Err(BackendError::Config("conversation is empty".into())),
        Some(last) if last.role != Role::User => Err(BackendError::Config(
            "conversation must end with a user message".into(),
        )),
        _ => {
            if let Some(m) = messages.iter().find(|m| m.content.is_empty()) {
                return Err(BackendError::Config(format!(
                    "empty {} message in conversation",
                    match m.role {
                        Role::System => "system",
                        Role::User => "user",
                        Role::Assistant => "assistant",
                    }
                )));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_bounds_are_enforced() {
        let mut cfg = BackendConfig::default();
        cfg.validate().unwrap();
        cfg.temperature = -0.1;
        assert!(cfg.validate().is_err());
        cfg.temperature = 0.6;
        cfg.top_p = 0.0;
        assert!(cfg.validate().is_err());
        cfg.top_p = 1.5;
        assert!(cfg.validate().is_err());
        cfg.top_p = 0.95;
        cfg.validate().unwrap();
    }

    #[test]
    fn conversations_must_end_with_user_turn() {
        assert!(check_conversation(&[]).is_err());
        assert!(check_conversation(&[ChatMessage::assistant("x")]).is_err());
        assert!(check_conversation(&[ChatMessage::user("x")]).is_ok());
        assert!(check_conversation(&[ChatMessage::user("")]).is_err());
    }
}
