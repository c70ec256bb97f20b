//! Run configuration in TOML. String values may reference environment
//! variables as `${NAME}`; API keys are only ever named, never stored.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::llm::Provider;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("environment variable {0} is not set")]
    MissingVar(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmConfig {
    pub provider: Provider,
    pub model: String,
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Name of the variable holding the API key.
    pub api_key_env: String,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// Direct approach only.
    #[serde(default = "default_temperature")]
    pub temperature: f64,
}

fn default_max_tokens() -> u32 {
    8192
}

fn default_temperature() -> f64 {
    crate::agents::DEFAULT_TEMPERATURE
}

fn default_budget() -> f64 {
    180.0
}

fn default_parallelism() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_budget")]
    pub budget_s: f64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub log: Option<PathBuf>,
    #[serde(default)]
    pub report_json: Option<PathBuf>,
    #[serde(default)]
    pub prompts_dir: Option<PathBuf>,
    /// Command that starts an MCP server for the agentic adapter; in-process when absent.
    #[serde(default)]
    pub mcp_server: Option<String>,
    #[serde(default)]
    pub llm: Option<LlmConfig>,
    /// External planners by adapter name: command templates with
    /// `{domain}`, `{problem}` and `{plan_out}`.
    #[serde(default)]
    pub planners: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget_s: default_budget(),
            parallelism: default_parallelism(),
            log: None,
            report_json: None,
            prompts_dir: None,
            mcp_server: None,
            llm: None,
            planners: BTreeMap::new(),
        }
    }
}

/// Replace every `${NAME}` using `lookup`.
pub fn interpolate(s: &str, lookup: &dyn Fn(&str) -> Option<String>) -> Result<String, ConfigError> {
    let mut out = String::new();
    let mut rest = s;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after
            .find('}')
            .ok_or_else(|| ConfigError::Invalid(format!("unterminated `${{` in `{s}`")))?;
        let name = &after[..end];
        out.push_str(&lookup(name).ok_or_else(|| ConfigError::MissingVar(name.to_string()))?);
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn interpolate_value(v: &mut toml::Value, lookup: &dyn Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
    match v {
        toml::Value::String(s) => *s = interpolate(s, lookup)?,
        toml::Value::Array(items) => {
            for item in items {
                interpolate_value(item, lookup)?;
            }
        }
        toml::Value::Table(t) => {
            for (_, item) in t.iter_mut() {
                interpolate_value(item, lookup)?;
            }
        }
        _ => {}
    }
    Ok(())
}

impl Config {
    pub fn parse_with(text: &str, lookup: &dyn Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut value: toml::Value = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        interpolate_value(&mut value, lookup)?;
        let config: Config = value.try_into().map_err(|e: toml::de::Error| ConfigError::Invalid(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with(text, &|name| std::env::var(name).ok())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if !(self.budget_s > 0.0 && self.budget_s.is_finite()) {
            return Err(ConfigError::Invalid(format!("budget_s must be positive, got {}", self.budget_s)));
        }
        if self.parallelism == 0 {
            return Err(ConfigError::Invalid("parallelism must be at least 1".into()));
        }
        if self.mcp_server.as_deref().is_some_and(|c| c.trim().is_empty()) {
            return Err(ConfigError::Invalid("mcp_server must name a command".into()));
        }
        Ok(())
    }

    /// The LLM section, with its key variable checked to be set.
    pub fn llm_ready(&self) -> Result<&LlmConfig, ConfigError> {
        let llm = self
            .llm
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("an LLM adapter needs an [llm] section".into()))?;
        if std::env::var(&llm.api_key_env).is_err() {
            return Err(ConfigError::MissingVar(llm.api_key_env.clone()));
        }
        Ok(llm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(name: &str) -> Option<String> {
        match name {
            "HOST" => Some("llm.example".into()),
            _ => None,
        }
    }

    #[test]
    fn full_config() {
        let c = Config::parse_with(
            r#"
budget_s = 60
parallelism = 4
log = "runs/log.jsonl"

[llm]
provider = "anthropic"
model = "m"
endpoint = "https://${HOST}/v1/messages"
api_key_env = "MY_KEY"

[planners]
lama = "fast-downward --alias lama-first --plan-file {plan_out} {domain} {problem}"
"#,
            &env,
        )
        .unwrap();
        assert_eq!(c.budget_s, 60.0);
        let llm = c.llm.unwrap();
        assert_eq!(llm.endpoint.as_deref(), Some("https://llm.example/v1/messages"));
        assert_eq!(llm.provider, Provider::Anthropic);
        assert_eq!(llm.temperature, 0.2);
        assert!(c.planners["lama"].contains("{plan_out}"));
    }

    #[test]
    fn errors() {
        assert!(matches!(Config::parse_with("log = \"${NOPE}\"", &env), Err(ConfigError::MissingVar(v)) if v == "NOPE"));
        assert!(matches!(Config::parse_with("budget_s = 0", &env), Err(ConfigError::Invalid(_))));
        assert!(matches!(Config::parse_with("bogus = 1", &env), Err(ConfigError::Invalid(_))));
        assert!(matches!(Config::parse_with("log = \"${OPEN\"", &env), Err(ConfigError::Invalid(_))));
        assert!(matches!(Config::parse_with("mcp_server = \" \"", &env), Err(ConfigError::Invalid(_))));
        assert_eq!(Config::parse_with("", &env).unwrap(), Config::default());
    }

    #[test]
    fn llm_key_must_be_set() {
        let c = Config::parse_with(
            "[llm]\nprovider = \"openai\"\nmodel = \"m\"\napi_key_env = \"PDDL_ENGINE_SURELY_UNSET_KEY\"\n",
            &env,
        )
        .unwrap();
        assert!(matches!(c.llm_ready(), Err(ConfigError::MissingVar(_))));
        assert!(Config::default().llm_ready().is_err());
    }
}
