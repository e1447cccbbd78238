use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::augment::ProviderConfig;
use crate::baseline::BaselineConfig;
use crate::finding::Descriptor;

/// Module carrying the model-assisted check's properties.
pub const LLM_MODULE: &str = "LlmStyleCheck";
pub const DEFAULT_CACHE_DIR: &str = ".styleplus-cache";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderKind {
    Remote,
    Offline,
    Replay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolConfig {
    pub provider: ProviderConfig,
    pub provider_kind: ProviderKind,
    pub replay_dir: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub lexicon_path: Option<PathBuf>,
    pub allowlist_path: Option<PathBuf>,
    pub baseline: BaselineConfig,
    pub max_in_flight: usize,
}

impl Default for ToolConfig {
    /// Without a configuration file the offline analyzer is used.
    fn default() -> Self {
        ToolConfig {
            provider: ProviderConfig::default(),
            provider_kind: ProviderKind::Offline,
            replay_dir: None,
            cache_dir: PathBuf::from(DEFAULT_CACHE_DIR),
            lexicon_path: None,
            allowlist_path: None,
            baseline: BaselineConfig::default(),
            max_in_flight: 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error at {line}:{column}: {message}")]
    Parse { line: u32, column: u32, message: String },
    #[error("config {line}:{column}: invalid value '{value}' for {property}: {reason}")]
    InvalidValue {
        property: String,
        value: String,
        reason: String,
        line: u32,
        column: u32,
    },
    #[error("config {line}:{column}: unknown property '{property}' in module {module}")]
    UnknownProperty {
        module: String,
        property: String,
        line: u32,
        column: u32,
    },
    #[error("config {line}:{column}: environment variable '{name}' is not set")]
    UnresolvedEnv { name: String, line: u32, column: u32 },
    #[error("missing required property '{0}' for the enabled {LLM_MODULE} module")]
    MissingRequiredProperty(String),
}

pub fn load_config(path: &Path) -> Result<ToolConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base, &|name| std::env::var(name).ok())
}

struct Prop<'a> {
    name: &'a str,
    value: String,
    line: u32,
    column: u32,
}

impl Prop<'_> {
    fn invalid(&self, reason: impl Into<String>) -> ConfigError {
        ConfigError::InvalidValue {
            property: self.name.to_string(),
            value: self.value.clone(),
            reason: reason.into(),
            line: self.line,
            column: self.column,
        }
    }

    fn parse<T: std::str::FromStr>(&self) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.value
            .trim()
            .parse()
            .map_err(|e: T::Err| self.invalid(e.to_string()))
    }

    fn boolean(&self) -> Result<bool, ConfigError> {
        match self.value.trim() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.invalid("expected true or false")),
        }
    }

    fn path(&self, base: &Path) -> PathBuf {
        let p = PathBuf::from(self.value.trim());
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    }
}

/// Parses a Checkstyle-shaped document. Relative paths, including the
/// default cache directory, resolve against `base`; `${ENV:NAME}` values
/// resolve through `env`.
pub fn parse_config(text: &str, base: &Path, env: &dyn Fn(&str) -> Option<String>) -> Result<ToolConfig, ConfigError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let pos = e.pos();
        ConfigError::Parse {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    let mut cfg = ToolConfig {
        cache_dir: base.join(DEFAULT_CACHE_DIR),
        ..ToolConfig::default()
    };

    for module in doc.descendants().filter(|n| n.has_tag_name("module")) {
        let pos = doc.text_pos_at(module.range().start);
        let Some(name) = module.attribute("name") else {
            return Err(ConfigError::Parse {
                line: pos.row,
                column: pos.col,
                message: "module element without a name attribute".into(),
            });
        };
        let mut props = Vec::new();
        for p in module.children().filter(|n| n.has_tag_name("property")) {
            let ppos = doc.text_pos_at(p.range().start);
            let (Some(pname), Some(value)) = (p.attribute("name"), p.attribute("value")) else {
                return Err(ConfigError::Parse {
                    line: ppos.row,
                    column: ppos.col,
                    message: "property element needs name and value attributes".into(),
                });
            };
            let value = resolve_env(value, env).ok_or_else(|| ConfigError::UnresolvedEnv {
                name: env_name(value).unwrap_or_default().to_string(),
                line: ppos.row,
                column: ppos.col,
            })?;
            props.push(Prop {
                name: pname,
                value,
                line: ppos.row,
                column: ppos.col,
            });
        }

        if name == LLM_MODULE {
            cfg.provider_kind = ProviderKind::Remote;
            for p in &props {
                match p.name {
                    "apiKey" => cfg.provider.api_key = p.value.clone(),
                    "endpoint" => cfg.provider.endpoint = p.value.trim().to_string(),
                    "model" => cfg.provider.model = Some(p.value.trim().to_string()).filter(|m| !m.is_empty()),
                    "temperature" => {
                        let t: f64 = p.parse()?;
                        if !(0.0..=2.0).contains(&t) {
                            return Err(p.invalid("temperature must be within [0, 2]"));
                        }
                        cfg.provider.temperature = t;
                    }
                    "maxTokens" => cfg.provider.max_tokens = Some(p.parse()?),
                    "thinkingTokens" => cfg.provider.thinking_tokens = Some(p.parse()?),
                    "showWarnings" => cfg.provider.show_warnings = p.boolean()?,
                    "enabled" => cfg.provider.enabled = p.boolean()?,
                    "provider" => {
                        cfg.provider_kind = match p.value.trim() {
                            "remote" => ProviderKind::Remote,
                            "offline" => ProviderKind::Offline,
                            "replay" => ProviderKind::Replay,
                            _ => return Err(p.invalid("expected remote, offline or replay")),
                        }
                    }
                    "replayDir" => cfg.replay_dir = Some(p.path(base)),
                    "cacheDir" => cfg.cache_dir = p.path(base),
                    "lexicon" => cfg.lexicon_path = Some(p.path(base)),
                    "allowlist" => cfg.allowlist_path = Some(p.path(base)),
                    "maxInFlight" => {
                        let n: usize = p.parse()?;
                        if n == 0 {
                            return Err(p.invalid("must be at least 1"));
                        }
                        cfg.max_in_flight = n;
                    }
                    other => {
                        return Err(ConfigError::UnknownProperty {
                            module: name.to_string(),
                            property: other.to_string(),
                            line: p.line,
                            column: p.column,
                        })
                    }
                }
            }
        } else if name == "AbbreviationAsWordInName" {
            for p in &props {
                if p.name == "allowedAbbreviationLength" {
                    let n: usize = p.parse()?;
                    cfg.baseline.max_consecutive_caps = n + 1;
                }
            }
        } else if let Some(descriptor) = Descriptor::from_name(name) {
            for p in props.iter().filter(|p| p.name == "format") {
                if regex::Regex::new(&p.value).is_err() {
                    return Err(p.invalid("not a valid regular expression"));
                }
                cfg.baseline.overrides.insert(descriptor, p.value.clone());
            }
        } else {
            log::debug!("ignoring config module {name}");
        }
    }

    if cfg.provider.enabled {
        match cfg.provider_kind {
            ProviderKind::Remote => {
                if cfg.provider.endpoint.is_empty() {
                    return Err(ConfigError::MissingRequiredProperty("endpoint".into()));
                }
                if cfg.provider.api_key.is_empty() {
                    return Err(ConfigError::MissingRequiredProperty("apiKey".into()));
                }
            }
            ProviderKind::Replay if cfg.replay_dir.is_none() => {
                return Err(ConfigError::MissingRequiredProperty("replayDir".into()));
            }
            _ => {}
        }
    }
    Ok(cfg)
}

fn env_name(value: &str) -> Option<&str> {
    value.trim().strip_prefix("${ENV:")?.strip_suffix('}')
}

fn resolve_env(value: &str, env: &dyn Fn(&str) -> Option<String>) -> Option<String> {
    match env_name(value) {
        Some(name) => env(name),
        None => Some(value.to_string()),
    }
}
