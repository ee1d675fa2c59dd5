//
// Copyright 2026 The UIM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

//! Server configuration: a flat `key = value` file.
//!
//! ```text
//! # comments start with '#'
//! telnet_port = 2323
//! admin_port = 8080
//! repository = ./sample
//! journal_path = ./journal.ndjson
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::net::IpAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;
use uim_core::render::{TerminalKind, TerminalProfile};
use uim_core::repository::Backend;

/// Environment variable that overrides the configuration file path.
pub const CONFIG_ENV: &str = "UIM_CONFIG";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerConfig {
    pub telnet_bind: IpAddr,
    pub telnet_port: u16,
    pub admin_bind: IpAddr,
    pub admin_port: u16,
    pub repository: Backend,
    pub default_profile: TerminalProfile,
    pub idle_timeout: Duration,
    pub max_sessions: usize,
    pub journal_path: PathBuf,
    pub journal_fsync: bool,
    /// How long to wait for NAWS / TERMINAL-TYPE before drawing anyway.
    pub negotiation_timeout: Duration,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

impl ServerConfig {
    /// Defaults around a repository path.
    pub fn new(repository: impl Into<PathBuf>, journal_path: impl Into<PathBuf>) -> ServerConfig {
        ServerConfig {
            telnet_bind: [0, 0, 0, 0].into(),
            telnet_port: 2323,
            admin_bind: [127, 0, 0, 1].into(),
            admin_port: 8080,
            repository: Backend::detect(repository.into()),
            default_profile: TerminalProfile::default(),
            idle_timeout: Duration::from_secs(900),
            max_sessions: 256,
            journal_path: journal_path.into(),
            journal_fsync: false,
            negotiation_timeout: Duration::from_millis(300),
        }
    }

    pub fn load(path: &Path) -> Result<ServerConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ServerConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parse file contents; relative paths are taken from `base`.
    pub fn parse(text: &str, base: &Path) -> Result<ServerConfig, ConfigError> {
        let mut repository = None;
        let mut backend = "auto".to_string();
        let mut journal = None;
        let mut cfg = ServerConfig::new("", "");
        let mut profile_name = "default".to_string();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax { line: line_no, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T, ConfigError> {
                value.parse().map_err(|_| ConfigError::Syntax {
                    line,
                    message: format!("`{key}` expects a number, got `{value}`"),
                })
            }
            match key {
                "telnet_port" => cfg.telnet_port = num(value, key, line_no)?,
                "admin_port" => cfg.admin_port = num(value, key, line_no)?,
                "telnet_bind" => {
                    cfg.telnet_bind = value.parse().map_err(|_| syntax(format!("bad address `{value}`")))?
                }
                "admin_bind" => cfg.admin_bind = value.parse().map_err(|_| syntax(format!("bad address `{value}`")))?,
                "repository" => repository = Some(base.join(value)),
                "repository_backend" => backend = value.to_string(),
                "default_profile" => profile_name = value.to_string(),
                "idle_timeout_secs" => cfg.idle_timeout = Duration::from_secs(num(value, key, line_no)?),
                "max_sessions" => cfg.max_sessions = num(value, key, line_no)?,
                "journal_path" => journal = Some(base.join(value)),
                "journal_fsync" => {
                    cfg.journal_fsync = value
                        .parse()
                        .map_err(|_| syntax(format!("`{key}` expects true or false")))?
                }
                "negotiation_timeout_ms" => cfg.negotiation_timeout = Duration::from_millis(num(value, key, line_no)?),
                other => return Err(syntax(format!("unknown key `{other}`"))),
            }
        }

        let repository = repository.ok_or(ConfigError::Missing("repository"))?;
        cfg.repository = match backend.as_str() {
            "auto" => Backend::detect(repository),
            "xml_dir" => Backend::XmlDir(repository),
            "tabular" => Backend::Tabular(repository),
            other => return Err(ConfigError::Invalid(format!("unknown repository_backend `{other}`"))),
        };
        cfg.journal_path = journal.ok_or(ConfigError::Missing("journal_path"))?;
        cfg.default_profile = profile(&profile_name)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Ports must differ (0 means "any free port") and at least one
    /// session must be allowed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.telnet_port != 0 && self.telnet_port == self.admin_port {
            return Err(ConfigError::Invalid(format!(
                "telnet_port and admin_port are both {}",
                self.telnet_port
            )));
        }
        if self.max_sessions == 0 {
            return Err(ConfigError::Invalid("max_sessions must be at least 1".into()));
        }
        Ok(())
    }
}

/// `default`, `rf`, `dumb`, or `WIDTHxHEIGHT` optionally followed by
/// `-dumb`.
fn profile(name: &str) -> Result<TerminalProfile, ConfigError> {
    let bad = || ConfigError::Invalid(format!("unknown default_profile `{name}`"));
    let (size, kind) = match name.strip_suffix("-dumb") {
        Some(size) => (size, TerminalKind::Dumb),
        None if name == "dumb" => ("default", TerminalKind::Dumb),
        None => (name, TerminalKind::Ansi),
    };
    let base = match size {
        "default" => TerminalProfile::default(),
        "rf" => TerminalProfile::rf(),
        _ => {
            let (w, h) = size.split_once('x').ok_or_else(bad)?;
            let (w, h) = (w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?);
            TerminalProfile::new(w, h, kind).map_err(|e| ConfigError::Invalid(e.to_string()))?
        }
    };
    Ok(base.with_kind(kind))
}
