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

//! Shared fixtures for the server tests.

#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde_json::Value;
use tempfile::TempDir;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use uim_server::server::Shared;
use uim_server::{Server, ServerConfig};
use uim_testkit::{ClientOptions, TelnetClient};

pub const WAIT: Duration = Duration::from_secs(5);

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn sample_dir() -> PathBuf {
    workspace_root().join("sample")
}

/// Copy the sample's XML documents into `dst`.
pub fn copy_sample(dst: &Path) {
    std::fs::create_dir_all(dst).unwrap();
    for entry in std::fs::read_dir(sample_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "xml") {
            std::fs::copy(&path, dst.join(path.file_name().unwrap())).unwrap();
        }
    }
}

/// Loopback config on free ports around a private copy of the sample.
pub fn config(dir: &Path) -> ServerConfig {
    let repo = dir.join("repo");
    copy_sample(&repo);
    let mut cfg = ServerConfig::new(repo, dir.join("journal.ndjson"));
    cfg.telnet_bind = [127, 0, 0, 1].into();
    cfg.telnet_port = 0;
    cfg.admin_port = 0;
    cfg
}

pub struct TestServer {
    pub telnet: SocketAddr,
    pub admin: SocketAddr,
    pub config: ServerConfig,
    pub shared: Arc<Shared>,
    stop: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<anyhow::Result<()>>>,
    pub dir: TempDir,
}

pub async fn start(tweak: impl FnOnce(&mut ServerConfig)) -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    tweak(&mut cfg);
    let server = Server::bind(cfg.clone()).await.unwrap();
    let (stop, stopped) = oneshot::channel::<()>();
    let (telnet, admin, shared) = (server.telnet_addr(), server.admin_addr(), server.shared());
    let task = tokio::spawn(server.run(async move {
        let _ = stopped.await;
    }));
    TestServer {
        telnet,
        admin,
        config: cfg,
        shared,
        stop: Some(stop),
        task: Some(task),
        dir,
    }
}

impl TestServer {
    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.admin, path)
    }

    /// Connect and wait for the opening screen.
    pub async fn client_with(&self, options: ClientOptions) -> TelnetClient {
        let mut c = TelnetClient::connect(self.telnet, options).await.unwrap();
        assert!(c.expect_frame(WAIT).await.unwrap(), "no opening frame");
        c
    }

    pub async fn client(&self) -> TelnetClient {
        self.client_with(ClientOptions::default()).await
    }

    pub fn journal_lines(&self) -> Vec<Value> {
        read_journal(&self.config.journal_path)
    }

    pub async fn stop(mut self) {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        if let Some(task) = self.task.take() {
            tokio::time::timeout(Duration::from_secs(10), task)
                .await
                .expect("server stops")
                .unwrap()
                .unwrap();
        }
    }
}

pub fn read_journal(path: &Path) -> Vec<Value> {
    let text = std::fs::read_to_string(path).unwrap_or_default();
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad journal line {l:?}: {e}")))
        .collect()
}

/// Run the COUNT flow once from the main menu.
pub async fn count_flow(c: &mut TelnetClient, sku: &str, qty: &str) {
    for line in ["1", sku, qty] {
        assert!(c.line(line, WAIT).await.unwrap(), "no frame after {line:?}");
    }
}

/// Minimal reader for a `text/event-stream` response.
pub struct EventStream {
    response: reqwest::Response,
    buf: String,
}

impl EventStream {
    pub async fn open(url: &str) -> EventStream {
        let response = reqwest::get(url).await.unwrap();
        assert_eq!(response.status(), 200);
        EventStream {
            response,
            buf: String::new(),
        }
    }

    /// Next `(event, data)` pair, or `None` when the stream ended or
    /// nothing arrived within `wait`.
    pub async fn next(&mut self, wait: Duration) -> Option<(String, Value)> {
        let deadline = tokio::time::Instant::now() + wait;
        loop {
            while let Some(end) = self.buf.find("\n\n") {
                let block: String = self.buf.drain(..end + 2).collect();
                let mut event = String::from("message");
                let mut data = String::new();
                for line in block.lines() {
                    if let Some(v) = line.strip_prefix("event:") {
                        event = v.trim().to_string();
                    } else if let Some(v) = line.strip_prefix("data:") {
                        data.push_str(v.trim_start());
                    }
                }
                if !data.is_empty() {
                    return Some((event, serde_json::from_str(&data).unwrap()));
                }
            }
            match tokio::time::timeout_at(deadline, self.response.chunk()).await {
                Ok(Ok(Some(bytes))) => self.buf.push_str(&String::from_utf8_lossy(&bytes)),
                _ => return None,
            }
        }
    }
}

/// Rows of a mirror event as strings.
pub fn event_rows(event: &Value) -> Vec<String> {
    event["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap().to_string())
        .collect()
}
