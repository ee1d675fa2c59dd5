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

//! Repository backends and the versioned snapshot served to sessions.
//!
//! Two backends produce the same [`RepositoryDoc`]:
//!
//! - a directory of `*.xml` documents, merged in file-name order;
//! - a directory of pipe-delimited tables (see [`tabular`]) that is turned
//!   into canonical XML first and then parsed like any other document.
//!
//! A load only succeeds when the merged document validates cleanly. A failed
//! [`Repository::reload`] leaves the served snapshot untouched.

pub mod tabular;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use arc_swap::ArcSwap;
use chrono::{DateTime, Utc};
use thiserror::Error;

use crate::flow::{self, ParseError, RepositoryDoc, ValidationReport};
pub use tabular::{generate_xml, GenerateError, TabularSource};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: no *.xml documents found", dir.display())]
    NoDocuments { dir: PathBuf },
    #[error("{}:{error}", file.display())]
    Parse { file: PathBuf, error: ParseError },
    #[error("{}: root menu `{found}` disagrees with `{expected}`", file.display())]
    ConflictingRoot {
        file: PathBuf,
        found: String,
        expected: String,
    },
    #[error("{}:{line}: {message}", file.display())]
    Table { file: PathBuf, line: u64, message: String },
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("repository failed validation\n{report}")]
    Invalid { report: ValidationReport },
}

impl LoadError {
    /// Short machine-readable code: the parse or violation code when there
    /// is one, otherwise the variant name.
    pub fn code(&self) -> String {
        match self {
            LoadError::Io { .. } => "Io".into(),
            LoadError::NoDocuments { .. } => "NoDocuments".into(),
            LoadError::Parse { error, .. } => error.code.to_string(),
            LoadError::ConflictingRoot { .. } => "ConflictingRoot".into(),
            LoadError::Table { .. } => "BadTable".into(),
            LoadError::Generate(e) => e.code().into(),
            LoadError::Invalid { report } => report
                .violations
                .first()
                .map_or_else(|| "Invalid".into(), |v| v.code.to_string()),
        }
    }

    /// File the error points into, if any.
    pub fn file(&self) -> Option<&Path> {
        match self {
            LoadError::Io { path, .. } => Some(path),
            LoadError::Parse { file, .. } | LoadError::ConflictingRoot { file, .. } | LoadError::Table { file, .. } => {
                Some(file)
            }
            _ => None,
        }
    }

    /// 1-based line the error points at, if any.
    pub fn line(&self) -> Option<u64> {
        match self {
            LoadError::Parse { error, .. } => Some(error.line as u64),
            LoadError::Table { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Where repository documents come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    XmlDir(PathBuf),
    Tabular(PathBuf),
}

impl Backend {
    /// Tabular when the directory holds a `screens.psv`, XML otherwise.
    pub fn detect(path: impl Into<PathBuf>) -> Backend {
        let path = path.into();
        if path.join(tabular::SCREENS_FILE).is_file() {
            Backend::Tabular(path)
        } else {
            Backend::XmlDir(path)
        }
    }

    pub fn path(&self) -> &Path {
        match self {
            Backend::XmlDir(p) | Backend::Tabular(p) => p,
        }
    }

    /// Load and validate.
    pub fn load(&self) -> Result<RepositoryDoc, LoadError> {
        match self {
            Backend::XmlDir(dir) => load_directory(dir),
            Backend::Tabular(dir) => load_tabular(dir),
        }
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn check(doc: RepositoryDoc) -> Result<RepositoryDoc, LoadError> {
    let report = flow::validate(&doc);
    for w in &report.warnings {
        tracing::warn!(at = %w.at, "{}", w.message);
    }
    if report.is_clean() {
        Ok(doc)
    } else {
        Err(LoadError::Invalid { report })
    }
}

/// Parse every `*.xml` file directly under `dir`, merge them and validate.
/// All files must name the same root menu.
pub fn load_directory(dir: &Path) -> Result<RepositoryDoc, LoadError> {
    let io_err = |source| LoadError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "xml") && p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(LoadError::NoDocuments { dir: dir.to_path_buf() });
    }

    let mut docs = Vec::with_capacity(files.len());
    let mut root: Option<String> = None;
    for file in &files {
        let text = read(file)?;
        let doc = flow::parse(&text).map_err(|error| LoadError::Parse {
            file: file.clone(),
            error,
        })?;
        match &root {
            None => root = Some(doc.root_menu().to_string()),
            Some(expected) if expected != doc.root_menu() => {
                return Err(LoadError::ConflictingRoot {
                    file: file.clone(),
                    found: doc.root_menu().to_string(),
                    expected: expected.clone(),
                })
            }
            Some(_) => {}
        }
        docs.push(doc);
    }
    let root = root.expect("at least one document");
    check(RepositoryDoc::merge(root, docs))
}

/// Read the tables under `dir`, generate XML from them, parse and validate.
pub fn load_tabular(dir: &Path) -> Result<RepositoryDoc, LoadError> {
    let source = TabularSource::read_dir(dir)?;
    let text = generate_xml(&source)?;
    let doc = flow::parse(&text).map_err(|error| LoadError::Parse {
        file: dir.join("<generated>"),
        error,
    })?;
    check(doc)
}

/// One immutable, validated generation of the repository.
#[derive(Debug)]
pub struct Snapshot {
    pub doc: RepositoryDoc,
    pub version: u64,
    pub loaded_at: DateTime<Utc>,
}

/// The shared, atomically replaced snapshot cell.
#[derive(Debug)]
pub struct Repository {
    backend: Backend,
    current: ArcSwap<Snapshot>,
    reload_lock: Mutex<()>,
}

impl Repository {
    /// Initial load; the first snapshot is version 1.
    pub fn open(backend: Backend) -> Result<Repository, LoadError> {
        let doc = backend.load()?;
        Ok(Repository::with_doc(backend, doc))
    }

    /// Serve an already validated document as version 1.
    pub fn with_doc(backend: Backend, doc: RepositoryDoc) -> Repository {
        let snapshot = Snapshot {
            doc,
            version: 1,
            loaded_at: Utc::now(),
        };
        Repository {
            backend,
            current: ArcSwap::from_pointee(snapshot),
            reload_lock: Mutex::new(()),
        }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn current(&self) -> Arc<Snapshot> {
        self.current.load_full()
    }

    /// Reload from the backend. On success the new snapshot (version + 1)
    /// is published; on failure the served snapshot is unchanged.
    pub fn reload(&self) -> Result<Arc<Snapshot>, LoadError> {
        let _guard = self.reload_lock.lock().unwrap_or_else(|e| e.into_inner());
        let doc = match self.backend.load() {
            Ok(doc) => doc,
            Err(e) => {
                tracing::error!(error = %e, "repository reload failed; keeping version {}", self.current().version);
                return Err(e);
            }
        };
        let next = Arc::new(Snapshot {
            doc,
            version: self.current().version + 1,
            loaded_at: Utc::now(),
        });
        self.current.store(next.clone());
        tracing::info!(version = next.version, "repository reloaded");
        Ok(next)
    }
}
