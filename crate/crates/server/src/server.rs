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

//! Listeners and the shared state behind them.

use std::future::Future;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use anyhow::Context;
use tokio::io::AsyncWriteExt;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{watch, Semaphore};
use tokio::task::JoinSet;
use uim_core::repository::Repository;

use crate::config::ServerConfig;
use crate::journal::Journal;
use crate::registry::Registry;

/// Sent to connections beyond `max_sessions` before they are closed.
pub const SERVER_FULL: &[u8] = b"SERVER FULL\r\n";

/// How long shutdown waits for sessions to say goodbye.
const DRAIN_TIMEOUT: Duration = Duration::from_secs(5);

/// State every connection handler and the admin API can reach.
#[derive(Debug)]
pub struct Shared {
    pub config: ServerConfig,
    pub repository: Arc<Repository>,
    pub journal: Journal,
    pub registry: Arc<Registry>,
    next_id: AtomicU64,
}

impl Shared {
    pub fn new(config: ServerConfig, repository: Arc<Repository>, journal: Journal) -> Shared {
        Shared {
            config,
            repository,
            journal,
            registry: Registry::new(),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn next_session_id(&self) -> u64 {
        self.next_id.fetch_add(1, Ordering::Relaxed)
    }
}

/// A bound but not yet running server.
#[derive(Debug)]
pub struct Server {
    shared: Arc<Shared>,
    telnet: TcpListener,
    admin: TcpListener,
}

impl Server {
    /// Load the repository, open the journal and bind both listeners.
    /// Port 0 picks a free port; see [`Server::telnet_addr`].
    pub async fn bind(config: ServerConfig) -> anyhow::Result<Server> {
        config.validate()?;
        let repository = Repository::open(config.repository.clone())
            .with_context(|| format!("loading repository {}", config.repository.path().display()))?;
        let journal = Journal::open(&config.journal_path, config.journal_fsync)
            .with_context(|| format!("opening journal {}", config.journal_path.display()))?;
        let telnet = TcpListener::bind((config.telnet_bind, config.telnet_port))
            .await
            .with_context(|| format!("binding telnet port {}", config.telnet_port))?;
        let admin = TcpListener::bind((config.admin_bind, config.admin_port))
            .await
            .with_context(|| format!("binding admin port {}", config.admin_port))?;
        let shared = Arc::new(Shared::new(config, Arc::new(repository), journal));
        Ok(Server { shared, telnet, admin })
    }

    pub fn telnet_addr(&self) -> SocketAddr {
        self.telnet.local_addr().expect("bound listener has an address")
    }

    pub fn admin_addr(&self) -> SocketAddr {
        self.admin.local_addr().expect("bound listener has an address")
    }

    pub fn shared(&self) -> Arc<Shared> {
        self.shared.clone()
    }

    /// Serve until `shutdown` resolves, then say goodbye to every session.
    pub async fn run(self, shutdown: impl Future<Output = ()>) -> anyhow::Result<()> {
        let Server { shared, telnet, admin } = self;
        tracing::info!(
            telnet = %telnet.local_addr()?,
            admin = %admin.local_addr()?,
            version = shared.repository.current().version,
            "uim server listening"
        );
        let (stop_tx, stop_rx) = watch::channel(false);

        let mut admin_stop = stop_rx.clone();
        let app = crate::admin::router(shared.clone());
        let admin_task = tokio::spawn(async move {
            let graceful = async move {
                let _ = admin_stop.wait_for(|stop| *stop).await;
            };
            if let Err(e) = axum::serve(admin, app).with_graceful_shutdown(graceful).await {
                tracing::error!(error = %e, "admin API stopped");
            }
        });

        let limit = Arc::new(Semaphore::new(shared.config.max_sessions));
        let mut sessions = JoinSet::new();
        tokio::pin!(shutdown);
        loop {
            tokio::select! {
                accepted = telnet.accept() => {
                    let (stream, remote) = match accepted {
                        Ok(pair) => pair,
                        Err(e) => {
                            tracing::warn!(error = %e, "accept failed");
                            continue;
                        }
                    };
                    match limit.clone().try_acquire_owned() {
                        Ok(permit) => {
                            let shared = shared.clone();
                            let stop = stop_rx.clone();
                            sessions.spawn(async move {
                                crate::conn::handle(stream, remote, shared, stop).await;
                                drop(permit);
                            });
                        }
                        Err(_) => {
                            tracing::warn!(%remote, "session limit reached; refusing connection");
                            tokio::spawn(refuse(stream));
                        }
                    }
                }
                Some(_) = sessions.join_next(), if !sessions.is_empty() => {}
                _ = &mut shutdown => break,
            }
        }

        tracing::info!(sessions = sessions.len(), "shutting down");
        drop(telnet);
        let _ = stop_tx.send(true);
        let drained =
            tokio::time::timeout(DRAIN_TIMEOUT, async { while sessions.join_next().await.is_some() {} }).await;
        if drained.is_err() {
            tracing::warn!(remaining = sessions.len(), "sessions did not close in time");
            sessions.abort_all();
        }
        let _ = admin_task.await;
        Ok(())
    }
}

async fn refuse(mut stream: TcpStream) {
    let _ = stream.write_all(SERVER_FULL).await;
    let _ = stream.shutdown().await;
}
