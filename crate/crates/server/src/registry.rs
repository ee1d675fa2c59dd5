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

//! Live session table shared by connection handlers and the admin API.
//!
//! Only handlers write their own entry. The admin side reads snapshots of
//! [`SessionInfo`], asks a handler to disconnect, or subscribes to its
//! mirror.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, MutexGuard};

use chrono::{DateTime, Utc};
use serde::Serialize;
use tokio::sync::{mpsc, Notify};
use uim_core::render::Frame;
use uim_core::shell::SessionId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionInfo {
    pub session_id: SessionId,
    pub remote: String,
    /// TERMINAL-TYPE name, when the client reported one.
    pub terminal: Option<String>,
    pub connected_at: DateTime<Utc>,
    pub screen: String,
    pub version: u64,
    pub last_activity: DateTime<Utc>,
}

/// One frame as sent to mirror subscribers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MirrorFrame {
    pub width: u16,
    pub height: u16,
    /// Rows with trailing blanks removed.
    pub rows: Vec<String>,
    /// Zero-based `[row, col]`.
    pub cursor: (u16, u16),
}

impl From<&Frame> for MirrorFrame {
    fn from(frame: &Frame) -> MirrorFrame {
        MirrorFrame {
            width: frame.width(),
            height: frame.height(),
            rows: frame.trimmed_rows().map(str::to_string).collect(),
            cursor: frame.cursor(),
        }
    }
}

#[derive(Debug)]
struct Entry {
    info: SessionInfo,
    last_frame: Option<MirrorFrame>,
    mirrors: Vec<mpsc::UnboundedSender<MirrorFrame>>,
    disconnect: Arc<Notify>,
}

#[derive(Debug, Default)]
pub struct Registry {
    sessions: Mutex<BTreeMap<SessionId, Entry>>,
}

/// Held by a connection handler; removes the entry when dropped, which also
/// ends every mirror stream of that session.
#[derive(Debug)]
pub struct Registration {
    registry: Arc<Registry>,
    id: SessionId,
    disconnect: Arc<Notify>,
}

impl Registry {
    pub fn new() -> Arc<Registry> {
        Arc::new(Registry::default())
    }

    fn lock(&self) -> MutexGuard<'_, BTreeMap<SessionId, Entry>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn register(self: &Arc<Self>, info: SessionInfo) -> Registration {
        let id = info.session_id;
        let disconnect = Arc::new(Notify::new());
        self.lock().insert(
            id,
            Entry {
                info,
                last_frame: None,
                mirrors: Vec::new(),
                disconnect: disconnect.clone(),
            },
        );
        Registration {
            registry: self.clone(),
            id,
            disconnect,
        }
    }

    /// Sessions ordered by id.
    pub fn list(&self) -> Vec<SessionInfo> {
        self.lock().values().map(|e| e.info.clone()).collect()
    }

    pub fn get(&self, id: SessionId) -> Option<SessionInfo> {
        self.lock().get(&id).map(|e| e.info.clone())
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Ask a session to close. False when it is not connected.
    pub fn disconnect(&self, id: SessionId) -> bool {
        match self.lock().get(&id) {
            Some(e) => {
                e.disconnect.notify_one();
                true
            }
            None => false,
        }
    }

    /// Subscribe to a session's frames. The first item is the frame on
    /// screen right now, then every frame presented after it, in order.
    pub fn subscribe(&self, id: SessionId) -> Option<mpsc::UnboundedReceiver<MirrorFrame>> {
        let mut sessions = self.lock();
        let entry = sessions.get_mut(&id)?;
        let (tx, rx) = mpsc::unbounded_channel();
        if let Some(frame) = &entry.last_frame {
            let _ = tx.send(frame.clone());
        }
        entry.mirrors.push(tx);
        Some(rx)
    }
}

impl Registration {
    pub fn id(&self) -> SessionId {
        self.id
    }

    /// Resolves when the admin asked for this session to be closed.
    pub async fn disconnect_requested(&self) {
        self.disconnect.notified().await
    }

    pub fn update(&self, apply: impl FnOnce(&mut SessionInfo)) {
        if let Some(e) = self.registry.lock().get_mut(&self.id) {
            apply(&mut e.info);
        }
    }

    /// Record a presented frame and forward it to every subscriber.
    pub fn publish(&self, frame: &Frame) {
        let event = MirrorFrame::from(frame);
        if let Some(e) = self.registry.lock().get_mut(&self.id) {
            e.mirrors.retain(|tx| tx.send(event.clone()).is_ok());
            e.last_frame = Some(event);
        }
    }
}

impl Drop for Registration {
    fn drop(&mut self) {
        self.registry.lock().remove(&self.id);
    }
}
