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

use super::consts::*;
use super::{Command, TelnetEvent, Verb};

/// Subnegotiation payloads longer than this are discarded.
pub const MAX_SUBNEGOTIATION: usize = 1024;

/// Recoverable protocol oddities. Reported next to the event stream, never in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolWarning {
    /// `IAC <code>` where code is not a known command.
    UnknownCommand(u8),
    /// `IAC SE` outside of a subnegotiation.
    StraySubnegotiationEnd,
    /// `IAC <code>` inside a subnegotiation where only `IAC IAC` / `IAC SE` are legal.
    BadSubnegotiationEscape { option: u8, code: u8 },
    /// Subnegotiation exceeded [`MAX_SUBNEGOTIATION`] bytes and was dropped.
    SubnegotiationOverflow { option: u8 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
enum State {
    #[default]
    Data,
    Iac,
    Verb(Verb),
    SbOption,
    Sb {
        option: u8,
        payload: Vec<u8>,
        iac: bool,
        overflow: bool,
    },
}

/// Decoder state carried across reads.
///
/// Holds whatever part of a command or subnegotiation has been seen so far.
/// Data bytes are never held back.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecodeBuffer {
    state: State,
}

/// Output of one [`DecodeBuffer::decode`] call.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decoded {
    pub events: Vec<TelnetEvent>,
    pub warnings: Vec<ProtocolWarning>,
}

impl DecodeBuffer {
    pub fn new() -> DecodeBuffer {
        DecodeBuffer::default()
    }

    /// True when no partial construct is pending.
    pub fn is_empty(&self) -> bool {
        self.state == State::Data
    }

    /// The bytes of the pending construct, as they appeared on the wire
    /// (modulo IAC escaping inside a subnegotiation payload).
    pub fn pending(&self) -> Vec<u8> {
        match &self.state {
            State::Data => Vec::new(),
            State::Iac => vec![IAC],
            State::Verb(v) => vec![IAC, v.code()],
            State::SbOption => vec![IAC, SB],
            State::Sb {
                option, payload, iac, ..
            } => {
                let mut out = vec![IAC, SB, *option];
                for &b in payload {
                    out.push(b);
                    if b == IAC {
                        out.push(IAC);
                    }
                }
                if *iac {
                    out.push(IAC);
                }
                out
            }
        }
    }

    /// Feed bytes; returns every construct completed by them.
    pub fn decode(&mut self, input: &[u8]) -> Decoded {
        let mut out = Decoded::default();
        let mut data: Vec<u8> = Vec::new();

        for &byte in input {
            let state = std::mem::take(&mut self.state);
            self.state = match state {
                State::Data => {
                    if byte == IAC {
                        State::Iac
                    } else {
                        data.push(byte);
                        State::Data
                    }
                }
                State::Iac => match byte {
                    IAC => {
                        data.push(IAC);
                        State::Data
                    }
                    SB => State::SbOption,
                    SE => {
                        out.warnings.push(ProtocolWarning::StraySubnegotiationEnd);
                        State::Data
                    }
                    code => {
                        if let Some(verb) = Verb::from_code(code) {
                            State::Verb(verb)
                        } else {
                            flush_data(&mut data, &mut out.events);
                            match Command::from_code(code) {
                                Some(cmd) => out.events.push(TelnetEvent::Command(cmd)),
                                None => out.warnings.push(ProtocolWarning::UnknownCommand(code)),
                            }
                            State::Data
                        }
                    }
                },
                State::Verb(verb) => {
                    flush_data(&mut data, &mut out.events);
                    out.events.push(TelnetEvent::Negotiate(verb, byte));
                    State::Data
                }
                State::SbOption => State::Sb {
                    option: byte,
                    payload: Vec::new(),
                    iac: false,
                    overflow: false,
                },
                State::Sb {
                    option,
                    mut payload,
                    iac,
                    mut overflow,
                } => {
                    if iac {
                        match byte {
                            SE => {
                                flush_data(&mut data, &mut out.events);
                                if overflow {
                                    out.warnings.push(ProtocolWarning::SubnegotiationOverflow { option });
                                } else {
                                    out.events.push(TelnetEvent::Subnegotiation(option, payload));
                                }
                                State::Data
                            }
                            IAC => {
                                push_payload(&mut payload, &mut overflow, IAC);
                                State::Sb {
                                    option,
                                    payload,
                                    iac: false,
                                    overflow,
                                }
                            }
                            code => {
                                out.warnings
                                    .push(ProtocolWarning::BadSubnegotiationEscape { option, code });
                                State::Sb {
                                    option,
                                    payload,
                                    iac: false,
                                    overflow,
                                }
                            }
                        }
                    } else if byte == IAC {
                        State::Sb {
                            option,
                            payload,
                            iac: true,
                            overflow,
                        }
                    } else {
                        push_payload(&mut payload, &mut overflow, byte);
                        State::Sb {
                            option,
                            payload,
                            iac: false,
                            overflow,
                        }
                    }
                }
            };
        }
        flush_data(&mut data, &mut out.events);
        out
    }
}

fn push_payload(payload: &mut Vec<u8>, overflow: &mut bool, byte: u8) {
    if payload.len() >= MAX_SUBNEGOTIATION {
        *overflow = true;
        payload.clear();
    }
    if !*overflow {
        payload.push(byte);
    }
}

fn flush_data(data: &mut Vec<u8>, events: &mut Vec<TelnetEvent>) {
    if !data.is_empty() {
        events.push(TelnetEvent::Data(std::mem::take(data)));
    }
}

/// Serialize one event, escaping IAC in data and subnegotiation payloads.
pub fn encode(event: &TelnetEvent) -> Vec<u8> {
    let mut out = Vec::new();
    encode_into(event, &mut out);
    out
}

pub fn encode_all<'a>(events: impl IntoIterator<Item = &'a TelnetEvent>) -> Vec<u8> {
    let mut out = Vec::new();
    for event in events {
        encode_into(event, &mut out);
    }
    out
}

fn encode_into(event: &TelnetEvent, out: &mut Vec<u8>) {
    match event {
        TelnetEvent::Data(bytes) => escape_into(bytes, out),
        TelnetEvent::Command(cmd) => out.extend_from_slice(&[IAC, cmd.code()]),
        TelnetEvent::Negotiate(verb, option) => out.extend_from_slice(&[IAC, verb.code(), *option]),
        TelnetEvent::Subnegotiation(option, payload) => {
            out.extend_from_slice(&[IAC, SB, *option]);
            escape_into(payload, out);
            out.extend_from_slice(&[IAC, SE]);
        }
    }
}

fn escape_into(bytes: &[u8], out: &mut Vec<u8>) {
    for &b in bytes {
        out.push(b);
        if b == IAC {
            out.push(IAC);
        }
    }
}

/// Merge adjacent `Data` events and drop empty ones.
///
/// Data is emitted as soon as it arrives, so the same byte stream read in
/// different chunks yields the same event stream only up to this normal form.
pub fn coalesce(events: impl IntoIterator<Item = TelnetEvent>) -> Vec<TelnetEvent> {
    let mut out: Vec<TelnetEvent> = Vec::new();
    for event in events {
        match event {
            TelnetEvent::Data(bytes) if bytes.is_empty() => {}
            TelnetEvent::Data(bytes) => {
                if let Some(TelnetEvent::Data(prev)) = out.last_mut() {
                    prev.extend_from_slice(&bytes);
                } else {
                    out.push(TelnetEvent::Data(bytes));
                }
            }
            other => out.push(other),
        }
    }
    out
}
