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

use super::codec::{encode_all, DecodeBuffer, ProtocolWarning};
use super::consts::*;
use super::negotiation::{Negotiator, QState};
use super::{Command, TelnetEvent};

/// What the application layer sees from one connection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectionEvent {
    Data(Vec<u8>),
    Command(Command),
    /// NAWS report. Zero dimensions are filtered out.
    Resize {
        width: u16,
        height: u16,
    },
    /// TERMINAL-TYPE IS reply, lowercased.
    TerminalType(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inbound {
    pub events: Vec<ConnectionEvent>,
    /// Bytes to write back to the peer (negotiation replies, TTYPE SEND).
    pub reply: Vec<u8>,
    pub warnings: Vec<ProtocolWarning>,
}

/// Server side of one Telnet connection: decoding, negotiation, and the
/// NAWS / TERMINAL-TYPE subnegotiations.
#[derive(Debug, Clone)]
pub struct TelnetConnection {
    decoder: DecodeBuffer,
    negotiator: Negotiator,
    terminal_type: Option<String>,
    window: Option<(u16, u16)>,
}

impl Default for TelnetConnection {
    fn default() -> Self {
        TelnetConnection::new()
    }
}

impl TelnetConnection {
    pub fn new() -> TelnetConnection {
        TelnetConnection {
            decoder: DecodeBuffer::new(),
            negotiator: Negotiator::server(),
            terminal_type: None,
            window: None,
        }
    }

    /// Opening negotiation bytes.
    pub fn start(&mut self) -> Vec<u8> {
        encode_all(&self.negotiator.initial_handshake())
    }

    pub fn negotiator(&self) -> &Negotiator {
        &self.negotiator
    }

    pub fn terminal_type(&self) -> Option<&str> {
        self.terminal_type.as_deref()
    }

    pub fn window(&self) -> Option<(u16, u16)> {
        self.window
    }

    /// True once the handshake has played out: every requested option is
    /// accepted or refused, and a granted TERMINAL-TYPE has been answered.
    pub fn handshake_complete(&self) -> bool {
        if !self.negotiator.is_settled() {
            return false;
        }
        let ttype = self.negotiator.active_remotely(OPT_TERMINAL_TYPE);
        let naws = self.negotiator.active_remotely(OPT_NAWS);
        (!ttype || self.terminal_type.is_some()) && (!naws || self.window.is_some())
    }

    pub fn receive(&mut self, bytes: &[u8]) -> Inbound {
        let decoded = self.decoder.decode(bytes);
        let mut inbound = Inbound {
            warnings: decoded.warnings,
            ..Inbound::default()
        };
        let mut replies = Vec::new();
        for event in decoded.events {
            match event {
                TelnetEvent::Data(bytes) => inbound.events.push(ConnectionEvent::Data(bytes)),
                TelnetEvent::Command(cmd) => inbound.events.push(ConnectionEvent::Command(cmd)),
                TelnetEvent::Negotiate(verb, option) => {
                    let before = self.negotiator.state(option).them.state;
                    replies.extend(self.negotiator.receive(verb, option));
                    let after = self.negotiator.state(option).them.state;
                    if option == OPT_TERMINAL_TYPE && before != QState::Yes && after == QState::Yes {
                        replies.push(TelnetEvent::Subnegotiation(OPT_TERMINAL_TYPE, vec![TTYPE_SEND]));
                    }
                }
                TelnetEvent::Subnegotiation(OPT_NAWS, payload) => {
                    if let [w1, w0, h1, h0] = payload[..] {
                        let width = u16::from_be_bytes([w1, w0]);
                        let height = u16::from_be_bytes([h1, h0]);
                        if width > 0 && height > 0 {
                            self.window = Some((width, height));
                            inbound.events.push(ConnectionEvent::Resize { width, height });
                        }
                    }
                }
                TelnetEvent::Subnegotiation(OPT_TERMINAL_TYPE, payload) => {
                    if let Some((&TTYPE_IS, name)) = payload.split_first() {
                        let name = String::from_utf8_lossy(name).trim().to_ascii_lowercase();
                        self.terminal_type = Some(name.clone());
                        inbound.events.push(ConnectionEvent::TerminalType(name));
                    }
                }
                TelnetEvent::Subnegotiation(..) => {}
            }
        }
        inbound.reply = encode_all(&replies);
        inbound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telnet::Verb;

    #[test]
    fn granted_terminal_type_is_requested_and_surfaced() {
        let mut conn = TelnetConnection::new();
        conn.start();
        let inbound = conn.receive(&[IAC, WILL, OPT_TERMINAL_TYPE]);
        assert_eq!(inbound.reply, vec![IAC, SB, OPT_TERMINAL_TYPE, TTYPE_SEND, IAC, SE]);
        let inbound = conn.receive(&[IAC, SB, 24, 0, b'v', b't', b'2', b'2', b'0', IAC, SE]);
        assert_eq!(inbound.events, vec![ConnectionEvent::TerminalType("vt220".into())]);
        assert_eq!(conn.terminal_type(), Some("vt220"));
    }

    #[test]
    fn refusing_everything_still_completes_handshake() {
        let mut conn = TelnetConnection::new();
        conn.start();
        assert!(!conn.handshake_complete());
        let inbound = conn.receive(&[
            IAC,
            DONT,
            OPT_ECHO,
            IAC,
            DONT,
            OPT_SGA,
            IAC,
            WONT,
            OPT_NAWS,
            IAC,
            WONT,
            OPT_TERMINAL_TYPE,
        ]);
        assert!(inbound.reply.is_empty());
        assert!(conn.handshake_complete());
        assert_eq!(conn.window(), None);
        assert_eq!(conn.terminal_type(), None);
    }

    #[test]
    fn naws_reports_size() {
        let mut conn = TelnetConnection::new();
        conn.start();
        conn.receive(&[IAC, WILL, OPT_NAWS]);
        let inbound = conn.receive(&[IAC, SB, OPT_NAWS, 0, 20, 0, 16, IAC, SE, b'1']);
        assert_eq!(
            inbound.events,
            vec![
                ConnectionEvent::Resize { width: 20, height: 16 },
                ConnectionEvent::Data(b"1".to_vec())
            ]
        );
    }

    #[test]
    fn client_initiated_sga_is_accepted() {
        let mut conn = TelnetConnection::new();
        let inbound = conn.receive(&[IAC, WILL, OPT_SGA, IAC, DO, 5]);
        assert_eq!(
            inbound.reply,
            encode_all(&[
                TelnetEvent::Negotiate(Verb::Do, OPT_SGA),
                TelnetEvent::Negotiate(Verb::Wont, 5)
            ])
        );
    }
}
