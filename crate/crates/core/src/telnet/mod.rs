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

//! Telnet wire protocol.
//!
//! The codec is split in three layers:
//!
//! - [`codec`]: byte stream <-> [`TelnetEvent`] conversion, restartable at any
//!   byte boundary.
//! - [`negotiation`]: the Q-method option negotiation state machine for the
//!   four supported options (ECHO, SGA, TERMINAL-TYPE, NAWS).
//! - [`connection`]: the server-side glue that decodes, answers negotiation,
//!   and surfaces window size and terminal type changes.

pub mod codec;
pub mod connection;
pub mod negotiation;

pub use codec::{coalesce, encode, encode_all, DecodeBuffer, Decoded, ProtocolWarning};
pub use connection::{ConnectionEvent, Inbound, TelnetConnection};
pub use negotiation::{Negotiator, OptionPolicy, OptionState, QState, Queue};

/// Protocol constants.
pub mod consts {
    pub const IAC: u8 = 255;
    pub const DONT: u8 = 254;
    pub const DO: u8 = 253;
    pub const WONT: u8 = 252;
    pub const WILL: u8 = 251;
    pub const SB: u8 = 250;
    pub const GA: u8 = 249;
    pub const EL: u8 = 248;
    pub const EC: u8 = 247;
    pub const AYT: u8 = 246;
    pub const AO: u8 = 245;
    pub const IP: u8 = 244;
    pub const BRK: u8 = 243;
    pub const NOP: u8 = 241;
    pub const SE: u8 = 240;

    pub const OPT_ECHO: u8 = 1;
    pub const OPT_SGA: u8 = 3;
    pub const OPT_TERMINAL_TYPE: u8 = 24;
    pub const OPT_NAWS: u8 = 31;

    /// TERMINAL-TYPE subnegotiation: client reply.
    pub const TTYPE_IS: u8 = 0;
    /// TERMINAL-TYPE subnegotiation: server request.
    pub const TTYPE_SEND: u8 = 1;
}

use consts::*;

/// Options this implementation will ever negotiate. Everything else is refused.
pub const SUPPORTED_OPTIONS: [u8; 4] = [OPT_ECHO, OPT_SGA, OPT_TERMINAL_TYPE, OPT_NAWS];

/// Two-byte Telnet commands carried as `IAC <code>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Nop,
    Brk,
    Ip,
    Ao,
    Ayt,
    Ec,
    El,
    Ga,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Nop,
        Command::Brk,
        Command::Ip,
        Command::Ao,
        Command::Ayt,
        Command::Ec,
        Command::El,
        Command::Ga,
    ];

    pub fn code(self) -> u8 {
        match self {
            Command::Nop => NOP,
            Command::Brk => BRK,
            Command::Ip => IP,
            Command::Ao => AO,
            Command::Ayt => AYT,
            Command::Ec => EC,
            Command::El => EL,
            Command::Ga => GA,
        }
    }

    pub fn from_code(code: u8) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.code() == code)
    }
}

/// Negotiation verbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verb {
    Will,
    Wont,
    Do,
    Dont,
}

impl Verb {
    pub const ALL: [Verb; 4] = [Verb::Will, Verb::Wont, Verb::Do, Verb::Dont];

    pub fn code(self) -> u8 {
        match self {
            Verb::Will => WILL,
            Verb::Wont => WONT,
            Verb::Do => DO,
            Verb::Dont => DONT,
        }
    }

    pub fn from_code(code: u8) -> Option<Verb> {
        match code {
            WILL => Some(Verb::Will),
            WONT => Some(Verb::Wont),
            DO => Some(Verb::Do),
            DONT => Some(Verb::Dont),
            _ => None,
        }
    }
}

/// One decoded unit of the Telnet stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TelnetEvent {
    /// Application bytes with IAC escaping removed.
    Data(Vec<u8>),
    Command(Command),
    Negotiate(Verb, u8),
    /// Bytes strictly between `IAC SB option` and `IAC SE`, unescaped.
    Subnegotiation(u8, Vec<u8>),
}

impl TelnetEvent {
    pub fn data(bytes: impl Into<Vec<u8>>) -> TelnetEvent {
        TelnetEvent::Data(bytes.into())
    }
}
