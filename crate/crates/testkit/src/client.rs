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

//! A scripted Telnet client for end-to-end tests.
//!
//! It answers the server's negotiation like a well-behaved terminal (NAWS
//! and TERMINAL-TYPE on request, server-side ECHO and SGA accepted), keeps
//! every application byte it receives as a transcript, and mirrors them into
//! a [`Vt`].

use std::io;
use std::time::Duration;

use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpStream, ToSocketAddrs};
use tokio::time::{timeout_at, Instant};
use uim_core::telnet::consts::{OPT_ECHO, OPT_NAWS, OPT_SGA, OPT_TERMINAL_TYPE, TTYPE_IS, TTYPE_SEND};
use uim_core::telnet::{encode, encode_all, DecodeBuffer, Negotiator, OptionPolicy, TelnetEvent};

use crate::vt::Vt;

#[derive(Debug, Clone)]
pub struct ClientOptions {
    pub width: u16,
    pub height: u16,
    /// Reported through TERMINAL-TYPE; `None` refuses the option.
    pub terminal: Option<String>,
    /// Refuse NAWS when false.
    pub naws: bool,
}

impl Default for ClientOptions {
    fn default() -> Self {
        ClientOptions {
            width: 80,
            height: 24,
            terminal: Some("vt100".into()),
            naws: true,
        }
    }
}

pub struct TelnetClient {
    stream: TcpStream,
    decoder: DecodeBuffer,
    negotiator: Negotiator,
    options: ClientOptions,
    naws_sent: bool,
    transcript: Vec<u8>,
    vt: Vt,
    vt_error: Option<String>,
    closed: bool,
}

/// Ends with `ESC[<digits>;<digits>H`.
fn ends_with_cursor_move(bytes: &[u8]) -> bool {
    let Some(rest) = bytes.strip_suffix(b"H") else {
        return false;
    };
    let digits = rest
        .iter()
        .rev()
        .take_while(|b| b.is_ascii_digit() || **b == b';')
        .count();
    digits > 0 && rest[..rest.len() - digits].ends_with(b"\x1b[")
}

impl TelnetClient {
    pub async fn connect(addr: impl ToSocketAddrs, options: ClientOptions) -> io::Result<TelnetClient> {
        let stream = TcpStream::connect(addr).await?;
        stream.set_nodelay(true)?;
        let mut policy = OptionPolicy::none().allow_remote(OPT_ECHO).allow_remote(OPT_SGA);
        if options.naws {
            policy = policy.allow_local(OPT_NAWS);
        }
        if options.terminal.is_some() {
            policy = policy.allow_local(OPT_TERMINAL_TYPE);
        }
        Ok(TelnetClient {
            stream,
            decoder: DecodeBuffer::new(),
            negotiator: Negotiator::new(policy),
            vt: Vt::new(options.width, options.height),
            options,
            naws_sent: false,
            transcript: Vec::new(),
            vt_error: None,
            closed: false,
        })
    }

    /// Application bytes received so far (negotiation stripped).
    pub fn transcript(&self) -> &[u8] {
        &self.transcript
    }

    pub fn vt(&self) -> &Vt {
        &self.vt
    }

    /// First output the VT could not interpret, if any.
    pub fn vt_error(&self) -> Option<&str> {
        self.vt_error.as_deref()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn negotiator(&self) -> &Negotiator {
        &self.negotiator
    }

    fn absorb(&mut self, bytes: &[u8]) -> Vec<u8> {
        let decoded = self.decoder.decode(bytes);
        let mut replies = Vec::new();
        for event in decoded.events {
            match event {
                TelnetEvent::Data(data) => {
                    if self.vt_error.is_none() {
                        if let Err(e) = self.vt.feed(&data) {
                            self.vt_error = Some(e.to_string());
                        }
                    }
                    self.transcript.extend_from_slice(&data);
                }
                TelnetEvent::Negotiate(verb, option) => replies.extend(self.negotiator.receive(verb, option)),
                TelnetEvent::Subnegotiation(OPT_TERMINAL_TYPE, payload) if payload == [TTYPE_SEND] => {
                    if let Some(name) = &self.options.terminal {
                        let mut body = vec![TTYPE_IS];
                        body.extend_from_slice(name.as_bytes());
                        replies.push(TelnetEvent::Subnegotiation(OPT_TERMINAL_TYPE, body));
                    }
                }
                _ => {}
            }
        }
        if !self.naws_sent && self.negotiator.active_locally(OPT_NAWS) {
            self.naws_sent = true;
            let mut body = self.options.width.to_be_bytes().to_vec();
            body.extend_from_slice(&self.options.height.to_be_bytes());
            replies.push(TelnetEvent::Subnegotiation(OPT_NAWS, body));
        }
        encode_all(&replies)
    }

    /// Read whatever arrives before `deadline`, stopping early once `done`
    /// holds for the transcript. Returns whether `done` was reached.
    async fn read_until(&mut self, deadline: Instant, done: impl Fn(&[u8]) -> bool) -> io::Result<bool> {
        let mut buf = [0u8; 4096];
        while !done(&self.transcript) {
            if self.closed {
                return Ok(false);
            }
            let n = match timeout_at(deadline, self.stream.read(&mut buf)).await {
                Err(_) => return Ok(false),
                Ok(Err(e)) if e.kind() == io::ErrorKind::ConnectionReset => 0,
                Ok(r) => r?,
            };
            if n == 0 {
                self.closed = true;
                continue;
            }
            let reply = self.absorb(&buf[..n]);
            if !reply.is_empty() {
                self.stream.write_all(&reply).await?;
            }
        }
        Ok(true)
    }

    /// Read until `pattern` has appeared in the transcript after byte
    /// `from`.
    pub async fn expect_after(&mut self, from: usize, pattern: &[u8], wait: Duration) -> io::Result<bool> {
        let from = from.min(self.transcript.len());
        self.read_until(Instant::now() + wait, |t| {
            t.len() >= from && t[from..].windows(pattern.len().max(1)).any(|w| w == pattern)
        })
        .await
    }

    /// Read until the transcript grew and ends with a cursor-positioning
    /// sequence, which is how every ANSI response ends.
    pub async fn expect_frame(&mut self, wait: Duration) -> io::Result<bool> {
        let from = self.transcript.len();
        self.read_until(Instant::now() + wait, |t| t.len() > from && ends_with_cursor_move(t))
            .await
    }

    /// Keep reading until the peer stays silent for `quiet` (or closes).
    pub async fn settle(&mut self, quiet: Duration) -> io::Result<()> {
        loop {
            let before = self.transcript.len();
            self.read_until(Instant::now() + quiet, |t| t.len() > before).await?;
            if self.transcript.len() == before || self.closed {
                return Ok(());
            }
        }
    }

    /// Read until the server closes the connection or `wait` runs out.
    /// Returns true on close.
    pub async fn expect_close(&mut self, wait: Duration) -> io::Result<bool> {
        self.read_until(Instant::now() + wait, |_| false).await?;
        Ok(self.closed)
    }

    /// Send raw application bytes (IAC is escaped).
    pub async fn send(&mut self, bytes: &[u8]) -> io::Result<()> {
        self.stream.write_all(&encode(&TelnetEvent::Data(bytes.to_vec()))).await
    }

    /// Send pre-encoded wire bytes verbatim.
    pub async fn send_raw(&mut self, bytes: &[u8]) -> io::Result<()> {
        self.stream.write_all(bytes).await
    }

    /// Type `line` and press Enter (CR LF).
    pub async fn send_line(&mut self, line: &str) -> io::Result<()> {
        let mut bytes = line.as_bytes().to_vec();
        bytes.extend_from_slice(b"\r\n");
        self.send(&bytes).await
    }

    /// Type a line and wait for the resulting frame.
    pub async fn line(&mut self, line: &str, wait: Duration) -> io::Result<bool> {
        self.send_line(line).await?;
        self.expect_frame(wait).await
    }

    /// Drop the TCP connection without any goodbye.
    pub async fn abort(self) {
        let _ = self.stream.into_std().map(|s| s.shutdown(std::net::Shutdown::Both));
    }
}
