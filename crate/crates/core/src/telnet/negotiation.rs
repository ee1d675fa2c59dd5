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

//! Option negotiation using the Q method (RFC 1143).
//!
//! Each supported option keeps two independent four-state machines: one for
//! our side (`us`, driven by DO/DONT, answered with WILL/WONT) and one for the
//! peer (`them`, driven by WILL/WONT, answered with DO/DONT). A one-slot queue
//! records a request for the opposite state that arrives mid-negotiation.
//! Options outside [`SUPPORTED_OPTIONS`] are never tracked and always refused.

use super::consts::*;
use super::{TelnetEvent, Verb, SUPPORTED_OPTIONS};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum QState {
    #[default]
    No,
    Yes,
    WantNo,
    WantYes,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Queue {
    #[default]
    Empty,
    Opposite,
}

/// One side of one option.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Side {
    pub state: QState,
    pub queue: Queue,
}

impl Side {
    pub fn is_active(&self) -> bool {
        self.state == QState::Yes
    }

    /// Neither side is mid-negotiation.
    pub fn is_settled(&self) -> bool {
        matches!(self.state, QState::Yes | QState::No) && self.queue == Queue::Empty
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OptionState {
    pub us: Side,
    pub them: Side,
}

/// Which supported options each side is willing to turn on when asked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OptionPolicy {
    local: u8,
    remote: u8,
}

fn slot(option: u8) -> Option<usize> {
    SUPPORTED_OPTIONS.iter().position(|&o| o == option)
}

impl OptionPolicy {
    /// Refuse everything.
    pub fn none() -> OptionPolicy {
        OptionPolicy::default()
    }

    /// Character-at-a-time server: we echo and suppress go-ahead; the peer may
    /// suppress go-ahead and report its window size and terminal type.
    pub fn server() -> OptionPolicy {
        OptionPolicy::none()
            .allow_local(OPT_ECHO)
            .allow_local(OPT_SGA)
            .allow_remote(OPT_SGA)
            .allow_remote(OPT_NAWS)
            .allow_remote(OPT_TERMINAL_TYPE)
    }

    pub fn allow_local(mut self, option: u8) -> OptionPolicy {
        if let Some(i) = slot(option) {
            self.local |= 1 << i;
        }
        self
    }

    pub fn allow_remote(mut self, option: u8) -> OptionPolicy {
        if let Some(i) = slot(option) {
            self.remote |= 1 << i;
        }
        self
    }

    pub fn accepts_local(&self, option: u8) -> bool {
        slot(option).is_some_and(|i| self.local & (1 << i) != 0)
    }

    pub fn accepts_remote(&self, option: u8) -> bool {
        slot(option).is_some_and(|i| self.remote & (1 << i) != 0)
    }
}

/// Negotiation state for one connection.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Negotiator {
    options: [OptionState; 4],
    policy: OptionPolicy,
}

#[derive(Clone, Copy)]
enum Dir {
    Us,
    Them,
}

impl Negotiator {
    pub fn new(policy: OptionPolicy) -> Negotiator {
        Negotiator {
            options: Default::default(),
            policy,
        }
    }

    pub fn server() -> Negotiator {
        Negotiator::new(OptionPolicy::server())
    }

    pub fn policy(&self) -> OptionPolicy {
        self.policy
    }

    /// State of `option`; unsupported options always read as fully off.
    pub fn state(&self, option: u8) -> OptionState {
        slot(option).map(|i| self.options[i]).unwrap_or_default()
    }

    pub fn active_locally(&self, option: u8) -> bool {
        self.state(option).us.is_active()
    }

    pub fn active_remotely(&self, option: u8) -> bool {
        self.state(option).them.is_active()
    }

    pub fn is_settled(&self) -> bool {
        self.options.iter().all(|o| o.us.is_settled() && o.them.is_settled())
    }

    /// The server's opening requests: WILL ECHO, WILL SGA, DO NAWS, DO TERMINAL-TYPE.
    pub fn initial_handshake(&mut self) -> Vec<TelnetEvent> {
        let mut out = Vec::new();
        out.extend(self.request_local(OPT_ECHO, true));
        out.extend(self.request_local(OPT_SGA, true));
        out.extend(self.request_remote(OPT_NAWS, true));
        out.extend(self.request_remote(OPT_TERMINAL_TYPE, true));
        out
    }

    /// Ask to enable or disable `option` on our side.
    pub fn request_local(&mut self, option: u8, enable: bool) -> Option<TelnetEvent> {
        self.request(Dir::Us, option, enable)
    }

    /// Ask the peer to enable or disable `option` on its side.
    pub fn request_remote(&mut self, option: u8, enable: bool) -> Option<TelnetEvent> {
        self.request(Dir::Them, option, enable)
    }

    fn request(&mut self, dir: Dir, option: u8, enable: bool) -> Option<TelnetEvent> {
        let i = slot(option)?;
        let (yes_verb, no_verb) = match dir {
            Dir::Us => (Verb::Will, Verb::Wont),
            Dir::Them => (Verb::Do, Verb::Dont),
        };
        let side = match dir {
            Dir::Us => &mut self.options[i].us,
            Dir::Them => &mut self.options[i].them,
        };
        use QState::*;
        match (enable, side.state, side.queue) {
            (true, No, _) => {
                side.state = WantYes;
                Some(TelnetEvent::Negotiate(yes_verb, option))
            }
            (true, WantNo, Queue::Empty) => {
                side.queue = Queue::Opposite;
                None
            }
            (true, WantYes, Queue::Opposite) => {
                side.queue = Queue::Empty;
                None
            }
            (false, Yes, _) => {
                side.state = WantNo;
                Some(TelnetEvent::Negotiate(no_verb, option))
            }
            (false, WantYes, Queue::Empty) => {
                side.queue = Queue::Opposite;
                None
            }
            (false, WantNo, Queue::Opposite) => {
                side.queue = Queue::Empty;
                None
            }
            // Already there, already negotiating towards it, or already queued.
            _ => None,
        }
    }

    /// Process a received verb; returns the replies to send.
    pub fn receive(&mut self, verb: Verb, option: u8) -> Vec<TelnetEvent> {
        let Some(i) = slot(option) else {
            return match verb {
                Verb::Will => vec![TelnetEvent::Negotiate(Verb::Dont, option)],
                Verb::Do => vec![TelnetEvent::Negotiate(Verb::Wont, option)],
                Verb::Wont | Verb::Dont => Vec::new(),
            };
        };
        let (dir, positive) = match verb {
            Verb::Will => (Dir::Them, true),
            Verb::Wont => (Dir::Them, false),
            Verb::Do => (Dir::Us, true),
            Verb::Dont => (Dir::Us, false),
        };
        let (agree, yes_verb, no_verb) = match dir {
            Dir::Us => (self.policy.accepts_local(option), Verb::Will, Verb::Wont),
            Dir::Them => (self.policy.accepts_remote(option), Verb::Do, Verb::Dont),
        };
        let side = match dir {
            Dir::Us => &mut self.options[i].us,
            Dir::Them => &mut self.options[i].them,
        };
        let mut replies = Vec::new();
        use QState::*;
        if positive {
            match (side.state, side.queue) {
                (No, _) => {
                    if agree {
                        side.state = Yes;
                        replies.push(TelnetEvent::Negotiate(yes_verb, option));
                    } else {
                        replies.push(TelnetEvent::Negotiate(no_verb, option));
                    }
                }
                (Yes, _) => {}
                // Peer answered our refusal with acceptance; treat as refused.
                (WantNo, Queue::Empty) => side.state = No,
                (WantNo, Queue::Opposite) => {
                    side.state = Yes;
                    side.queue = Queue::Empty;
                }
                (WantYes, Queue::Empty) => side.state = Yes,
                (WantYes, Queue::Opposite) => {
                    side.state = WantNo;
                    side.queue = Queue::Empty;
                    replies.push(TelnetEvent::Negotiate(no_verb, option));
                }
            }
        } else {
            match (side.state, side.queue) {
                (No, _) => {}
                (Yes, _) => {
                    side.state = No;
                    replies.push(TelnetEvent::Negotiate(no_verb, option));
                }
                (WantNo, Queue::Empty) => side.state = No,
                (WantNo, Queue::Opposite) => {
                    side.state = WantYes;
                    side.queue = Queue::Empty;
                    replies.push(TelnetEvent::Negotiate(yes_verb, option));
                }
                (WantYes, _) => {
                    side.state = No;
                    side.queue = Queue::Empty;
                }
            }
        }
        replies
    }
}
