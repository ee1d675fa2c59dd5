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

//! One Telnet connection from handshake to goodbye.
//!
//! The handler negotiates, waits briefly for the window size and terminal
//! type, opens a shell session and then loops: bytes in, lines out to the
//! shell, frames back to the terminal. Records are journaled before the
//! frame that follows them is sent.

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use chrono::Utc;
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::TcpStream;
use tokio::sync::watch;
use tokio::time::{sleep_until, timeout_at, Instant};
use uim_core::render::{to_ansi, to_plain, Frame, TerminalKind, TerminalProfile};
use uim_core::shell::{DataRecord, Session, ShellEffect, MSG_SAVE_FAILED};
use uim_core::telnet::{Command, ConnectionEvent, TelnetConnection};

use crate::line::{Edit, LineEditor};
use crate::registry::{Registration, SessionInfo};
use crate::server::Shared;

/// Why a session ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloseReason {
    PeerClosed,
    IdleTimeout,
    AdminDisconnect,
    Shutdown,
    ShellTerminated,
}

/// What the terminal shows: the last frame plus any echoed keystrokes.
#[derive(Debug)]
struct Display {
    kind: TerminalKind,
    shown_frame: Option<Frame>,
    masked: bool,
    /// Characters typed since the last frame.
    typed: usize,
    /// How many of them are visible on screen.
    echoed: usize,
}

fn goto(frame: &Frame) -> Vec<u8> {
    let (r, c) = frame.cursor();
    format!("\x1b[{};{}H", r + 1, c + 1).into_bytes()
}

impl Display {
    fn new(kind: TerminalKind) -> Display {
        Display {
            kind,
            shown_frame: None,
            masked: false,
            typed: 0,
            echoed: 0,
        }
    }

    /// Bytes that take the terminal to `frame`, then re-echo `pending`.
    /// ANSI output always ends with a cursor move, even when nothing else
    /// changed, so a client can tell where a response ends.
    fn frame(&mut self, frame: &Frame, kind: TerminalKind, pending: &str) -> Vec<u8> {
        let mut out = match kind {
            TerminalKind::Ansi => {
                let previous = self.shown_frame.as_ref().filter(|_| self.kind == TerminalKind::Ansi);
                let bytes = to_ansi(frame, previous);
                if bytes.is_empty() {
                    goto(frame)
                } else {
                    bytes
                }
            }
            TerminalKind::Dumb => to_plain(frame),
        };
        self.kind = kind;
        self.shown_frame = Some(frame.clone());
        self.masked = frame.masked_cursor_field();
        self.typed = 0;
        self.echoed = 0;
        for b in pending.bytes() {
            out.extend(self.insert(b));
        }
        out
    }

    fn insert(&mut self, b: u8) -> Vec<u8> {
        self.typed += 1;
        if self.echoed + 1 != self.typed {
            return Vec::new();
        }
        let shown = if self.masked { b'*' } else { b };
        if self.kind == TerminalKind::Ansi {
            let Some(frame) = self.shown_frame.as_mut() else {
                return Vec::new();
            };
            let (row, col) = frame.cursor();
            // Keep the cursor inside the row so diffs stay exact.
            if col + 1 >= frame.width() {
                return Vec::new();
            }
            frame.overlay(row, col, &(shown as char).to_string());
            frame.set_cursor(row, col + 1);
        }
        self.echoed += 1;
        vec![shown]
    }

    fn erase(&mut self) -> Vec<u8> {
        self.typed = self.typed.saturating_sub(1);
        if self.echoed <= self.typed {
            return Vec::new();
        }
        self.echoed -= 1;
        if self.kind == TerminalKind::Ansi {
            if let Some(frame) = self.shown_frame.as_mut() {
                let (row, col) = frame.cursor();
                let col = col.saturating_sub(1);
                frame.overlay(row, col, " ");
                frame.set_cursor(row, col);
            }
        }
        b"\x08 \x08".to_vec()
    }

    fn enter(&mut self) -> Vec<u8> {
        self.typed = 0;
        self.echoed = 0;
        match self.kind {
            TerminalKind::Dumb => b"\r\n".to_vec(),
            TerminalKind::Ansi => Vec::new(),
        }
    }
}

struct Handler<'a> {
    shared: &'a Shared,
    stream: TcpStream,
    telnet: TelnetConnection,
    editor: LineEditor,
    display: Display,
    session: Session,
    registration: Registration,
    /// Records the journal has not accepted yet.
    unsaved: Vec<DataRecord>,
    out: Vec<u8>,
}

/// Serve one accepted connection until it closes. Errors only end this
/// session.
pub async fn handle(stream: TcpStream, remote: SocketAddr, shared: Arc<Shared>, shutdown: watch::Receiver<bool>) {
    let id = shared.next_session_id();
    match run(stream, remote, id, &shared, shutdown).await {
        Ok(reason) => tracing::info!(session = id, %remote, ?reason, "session closed"),
        Err(e) => tracing::info!(session = id, %remote, error = %e, "session dropped"),
    }
}

async fn run(
    mut stream: TcpStream,
    remote: SocketAddr,
    id: u64,
    shared: &Shared,
    mut shutdown: watch::Receiver<bool>,
) -> io::Result<CloseReason> {
    let _ = stream.set_nodelay(true);
    let mut telnet = TelnetConnection::new();
    stream.write_all(&telnet.start()).await?;

    // Give the client a moment to report its window and terminal type.
    let mut early = Vec::new();
    let window_end = Instant::now() + shared.config.negotiation_timeout;
    let mut buf = [0u8; 4096];
    while !telnet.handshake_complete() {
        let n = match timeout_at(window_end, stream.read(&mut buf)).await {
            Err(_) => break,
            Ok(n) => n?,
        };
        if n == 0 {
            return Ok(CloseReason::PeerClosed);
        }
        let inbound = telnet.receive(&buf[..n]);
        stream.write_all(&inbound.reply).await?;
        for event in inbound.events {
            if let ConnectionEvent::Data(bytes) = event {
                early.extend(bytes);
            }
        }
    }

    let profile = initial_profile(&shared.config.default_profile, &telnet);
    let snapshot = shared.repository.current();
    let (session, opening) = Session::open(id, snapshot, profile.clone());
    let now = Utc::now();
    let registration = shared.registry.register(SessionInfo {
        session_id: id,
        remote: remote.to_string(),
        terminal: telnet.terminal_type().map(str::to_string),
        connected_at: now,
        screen: session.current_screen().to_string(),
        version: session.snapshot_version(),
        last_activity: now,
    });
    tracing::info!(session = id, %remote, width = profile.width, height = profile.height, terminal = %profile.name, "session opened");

    let mut h = Handler {
        shared,
        stream,
        telnet,
        editor: LineEditor::new(),
        display: Display::new(profile.kind),
        session,
        registration,
        unsaved: Vec::new(),
        out: Vec::new(),
    };
    h.present(&opening.frame);
    if let Some(reason) = h.data(&early).await {
        return h.close(reason).await;
    }
    h.flush().await?;

    let idle = shared.config.idle_timeout;
    let mut deadline = Instant::now() + idle;
    loop {
        let reason = tokio::select! {
            read = h.stream.read(&mut buf) => {
                let n = read?;
                if n == 0 {
                    return Ok(CloseReason::PeerClosed);
                }
                deadline = Instant::now() + idle;
                h.registration.update(|i| i.last_activity = Utc::now());
                let reason = h.receive(&buf[..n]).await;
                h.flush().await?;
                match reason {
                    Some(r) => r,
                    None => continue,
                }
            }
            _ = sleep_until(deadline) => CloseReason::IdleTimeout,
            _ = h.registration.disconnect_requested() => CloseReason::AdminDisconnect,
            _ = stopped(&mut shutdown) => CloseReason::Shutdown,
        };
        return h.close(reason).await;
    }
}

async fn stopped(shutdown: &mut watch::Receiver<bool>) {
    // A dropped sender also means the server is going away.
    let _ = shutdown.wait_for(|stop| *stop).await;
}

fn initial_profile(default: &TerminalProfile, telnet: &TelnetConnection) -> TerminalProfile {
    let mut profile = default.clone();
    if let Some((w, h)) = telnet.window() {
        profile = profile.resized(w, h).0;
    }
    if let Some(name) = telnet.terminal_type() {
        apply_terminal_type(&mut profile, name);
    }
    profile
}

fn apply_terminal_type(profile: &mut TerminalProfile, name: &str) {
    profile.name = name.to_string();
    if name == "dumb" {
        profile.kind = TerminalKind::Dumb;
    }
}

impl Handler<'_> {
    fn present(&mut self, frame: &Frame) {
        let kind = self.session.profile().kind;
        let bytes = self.display.frame(frame, kind, self.editor.pending());
        self.out.extend(bytes);
        self.registration.publish(frame);
        let (screen, version) = (
            self.session.current_screen().to_string(),
            self.session.snapshot_version(),
        );
        self.registration.update(|i| {
            i.screen = screen;
            i.version = version;
        });
    }

    async fn flush(&mut self) -> io::Result<()> {
        if !self.out.is_empty() {
            let out = std::mem::take(&mut self.out);
            self.stream.write_all(&out).await?;
        }
        Ok(())
    }

    async fn receive(&mut self, bytes: &[u8]) -> Option<CloseReason> {
        let inbound = self.telnet.receive(bytes);
        for w in &inbound.warnings {
            tracing::debug!(session = self.session.id(), warning = ?w, "protocol warning");
        }
        self.out.extend(inbound.reply);
        for event in inbound.events {
            let reason = match event {
                ConnectionEvent::Data(data) => self.data(&data).await,
                ConnectionEvent::Command(Command::Ec) => self.data(&[0x08]).await,
                ConnectionEvent::Command(Command::El) => {
                    for edit in self.editor.clear() {
                        self.edit(edit).await;
                    }
                    None
                }
                ConnectionEvent::Command(_) => None,
                ConnectionEvent::Resize { width, height } => {
                    let effect = self.session.handle_resize(width, height);
                    self.present(&effect.frame);
                    None
                }
                ConnectionEvent::TerminalType(name) => {
                    self.registration.update(|i| i.terminal = Some(name.clone()));
                    let mut profile = self.session.profile().clone();
                    apply_terminal_type(&mut profile, &name);
                    if profile != *self.session.profile() {
                        let effect = self.session.set_profile(profile);
                        self.present(&effect.frame);
                    }
                    None
                }
            };
            if reason.is_some() {
                return reason;
            }
        }
        None
    }

    async fn data(&mut self, bytes: &[u8]) -> Option<CloseReason> {
        for edit in self.editor.feed(bytes) {
            if let Some(reason) = self.edit(edit).await {
                return Some(reason);
            }
        }
        None
    }

    async fn edit(&mut self, edit: Edit) -> Option<CloseReason> {
        match edit {
            Edit::Insert(b) => {
                let echo = self.display.insert(b);
                self.out.extend(echo);
                None
            }
            Edit::Erase => {
                let echo = self.display.erase();
                self.out.extend(echo);
                None
            }
            Edit::Line(line) => {
                let echo = self.display.enter();
                self.out.extend(echo);
                self.submit(&line).await
            }
        }
    }

    /// Try to journal everything unsaved. On failure the current screen is
    /// redrawn with the failure notice and false is returned.
    async fn save(&mut self) -> bool {
        if self.unsaved.is_empty() {
            return true;
        }
        match self.shared.journal.append(self.unsaved.clone()).await {
            Ok(()) => {
                self.unsaved.clear();
                true
            }
            Err(e) => {
                tracing::warn!(session = self.session.id(), error = %e, unsaved = self.unsaved.len(), "records kept for retry");
                let notice = self.session.notice(MSG_SAVE_FAILED);
                self.present(&notice.frame);
                false
            }
        }
    }

    async fn submit(&mut self, line: &str) -> Option<CloseReason> {
        // A line typed while records are unsaved is spent on the retry.
        if !self.unsaved.is_empty() && !self.save().await {
            return None;
        }
        self.session.offer_snapshot(self.shared.repository.current());
        let ShellEffect {
            frame,
            records,
            terminated,
        } = self.session.handle_line(line);
        self.unsaved.extend(records);
        if !self.save().await {
            return None;
        }
        self.present(&frame);
        terminated.then_some(CloseReason::ShellTerminated)
    }

    async fn close(mut self, reason: CloseReason) -> io::Result<CloseReason> {
        if reason != CloseReason::ShellTerminated {
            let bye = self.session.goodbye();
            self.present(&bye.frame);
        }
        if !self.unsaved.is_empty() {
            tracing::error!(
                session = self.session.id(),
                lost = self.unsaved.len(),
                "session ended with unsaved records"
            );
        }
        self.flush().await?;
        let _ = self.stream.shutdown().await;
        Ok(reason)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn menu_frame() -> Frame {
        let mut f = Frame::blank(10, 4);
        f.set_row(0, "MAIN");
        f.set_row(3, "0=Back");
        f.set_cursor(3, 7);
        f
    }

    #[test]
    fn echo_is_tracked_in_the_displayed_frame() {
        let mut d = Display::new(TerminalKind::Ansi);
        let first = d.frame(&menu_frame(), TerminalKind::Ansi, "");
        assert!(first.starts_with(b"\x1b[2J"));
        assert_eq!(d.insert(b'1'), b"1");
        assert_eq!(d.insert(b'2'), b"2");
        // Column 9 is the last cell: no more echo, and no erase for it.
        assert_eq!(d.insert(b'3'), b"");
        assert_eq!(d.erase(), b"");
        assert_eq!(d.erase(), b"\x08 \x08");
        assert_eq!(d.shown_frame.as_ref().unwrap().row(3), "0=Back 1  ");
        // Redrawing the same frame clears the echo.
        let redraw = d.frame(&menu_frame(), TerminalKind::Ansi, "");
        assert_eq!(redraw, b"\x1b[4;1H0=Back  \x1b[4;8H");
        assert_eq!(d.frame(&menu_frame(), TerminalKind::Ansi, ""), b"\x1b[4;8H");
    }

    #[test]
    fn masked_and_plain_echo() {
        let mut d = Display::new(TerminalKind::Dumb);
        let mut f = menu_frame();
        f.set_masked_cursor_field(true);
        d.frame(&f, TerminalKind::Dumb, "");
        assert_eq!(d.insert(b'x'), b"*");
        assert_eq!(d.enter(), b"\r\n");
        let out = d.frame(&menu_frame(), TerminalKind::Dumb, "ab");
        assert!(out.ends_with(b"0=Back\r\nab"), "{:?}", String::from_utf8_lossy(&out));
    }
}
