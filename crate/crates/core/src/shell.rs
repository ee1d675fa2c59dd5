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

//! Per-session interpreter.
//!
//! A [`Session`] walks the menu tree and runs flows in response to operator
//! lines. Menus are selected by number and left with `0`; `<` and `>` page
//! through long lists. Inside a flow every screen resolves to an outcome
//! (`ok`, `back`, or a single-option value) which the flow maps to the next
//! screen or to its end. Completed input and option screens produce
//! [`DataRecord`]s.
//!
//! `0` always means back. On input screens a literal zero is typed as `00`.

use std::collections::BTreeSet;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::flow::{Bindings, FieldDef, FieldKind, Flow, MenuTarget, Next, Outcome, ScreenDef, ScreenKind};
use crate::render::{layout, paginate, Frame, ScreenView, TerminalProfile};
use crate::repository::Snapshot;

pub const MSG_INVALID: &str = "INVALID";
pub const MSG_AT_TOP: &str = "AT TOP";
pub const MSG_REQUIRED: &str = "REQUIRED";
pub const MSG_TOO_LONG: &str = "TOO LONG";
pub const MSG_SAVE_FAILED: &str = "SAVE FAILED - RETRY";
pub const GOODBYE: &str = "GOODBYE";

pub type SessionId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NavEntry {
    Menu { screen: String, page: usize },
    Flow(FlowEntry),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEntry {
    pub flow: String,
    /// Screens visited in this flow; the last one is current. Never empty.
    pub steps: Vec<String>,
    pub page: usize,
}

/// Operator submission from one completed input or option screen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataRecord {
    pub session_id: SessionId,
    pub timestamp: DateTime<Utc>,
    pub flow: String,
    pub screen: String,
    /// Values collected by this screen only.
    pub bindings: Bindings,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellEffect {
    pub frame: Frame,
    pub records: Vec<DataRecord>,
    /// The session should be closed after presenting `frame`.
    pub terminated: bool,
}

/// A reference that validation should have ruled out.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lookup failed: {0}")]
pub struct LookupError(String);

#[derive(Debug, Clone, Default)]
struct InputProgress {
    field: usize,
    values: Vec<String>,
}

#[derive(Debug)]
pub struct Session {
    id: SessionId,
    snapshot: Arc<Snapshot>,
    pending: Option<Arc<Snapshot>>,
    nav: Vec<NavEntry>,
    bindings: Bindings,
    input: InputProgress,
    multi_selected: BTreeSet<String>,
    profile: TerminalProfile,
    terminated: bool,
}

fn fault(what: impl Into<String>) -> LookupError {
    LookupError(what.into())
}

/// Parse a selection: 1-2 digits without a leading zero.
fn selection(line: &str) -> Option<usize> {
    let ok = !line.is_empty() && line.len() <= 2 && line.bytes().all(|b| b.is_ascii_digit()) && !line.starts_with('0');
    ok.then(|| line.parse().ok()).flatten()
}

fn check_field(field: &FieldDef, value: &str) -> Result<(), &'static str> {
    if value.is_empty() {
        return if field.required { Err(MSG_REQUIRED) } else { Ok(()) };
    }
    if value.chars().count() > field.max_len {
        return Err(MSG_TOO_LONG);
    }
    if field.kind == FieldKind::Number && !value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(MSG_INVALID);
    }
    Ok(())
}

impl Session {
    /// Start at the root menu.
    pub fn open(id: SessionId, snapshot: Arc<Snapshot>, profile: TerminalProfile) -> (Session, ShellEffect) {
        let root = snapshot.doc.root_menu().to_string();
        let mut session = Session {
            id,
            snapshot,
            pending: None,
            nav: vec![NavEntry::Menu { screen: root, page: 0 }],
            bindings: Bindings::new(),
            input: InputProgress::default(),
            multi_selected: BTreeSet::new(),
            profile,
            terminated: false,
        };
        let effect = session.effect(None, Vec::new());
        (session, effect)
    }

    pub fn id(&self) -> SessionId {
        self.id
    }

    pub fn nav(&self) -> &[NavEntry] {
        &self.nav
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    pub fn profile(&self) -> &TerminalProfile {
        &self.profile
    }

    pub fn snapshot_version(&self) -> u64 {
        self.snapshot.version
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn in_flow(&self) -> bool {
        matches!(self.nav.last(), Some(NavEntry::Flow(_)))
    }

    /// Steps in the active flow, 0 outside flows.
    pub fn flow_depth(&self) -> usize {
        match self.nav.last() {
            Some(NavEntry::Flow(f)) => f.steps.len(),
            _ => 0,
        }
    }

    /// Id of the screen currently shown.
    pub fn current_screen(&self) -> &str {
        match self.nav.last().expect("nav stack is never empty") {
            NavEntry::Menu { screen, .. } => screen,
            NavEntry::Flow(f) => f.steps.last().expect("flow steps are never empty"),
        }
    }

    /// Offer a newer repository snapshot. It is adopted right away outside
    /// flows and when the active flow ends otherwise. Returns true when
    /// adopted now.
    pub fn offer_snapshot(&mut self, snapshot: Arc<Snapshot>) -> bool {
        if snapshot.version <= self.snapshot.version {
            return false;
        }
        if self.in_flow() {
            self.pending = Some(snapshot);
            false
        } else {
            self.adopt(snapshot);
            true
        }
    }

    fn adopt(&mut self, snapshot: Arc<Snapshot>) {
        let doc = &snapshot.doc;
        let still_valid = self
            .nav
            .first()
            .is_some_and(|e| matches!(e, NavEntry::Menu { screen, .. } if screen == doc.root_menu()))
            && self.nav.iter().all(|e| match e {
                NavEntry::Menu { screen, .. } => doc.screen(screen).is_some_and(|s| s.kind.is_menu()),
                NavEntry::Flow(_) => false,
            });
        if !still_valid {
            self.nav = vec![NavEntry::Menu {
                screen: doc.root_menu().to_string(),
                page: 0,
            }];
        }
        tracing::debug!(
            session = self.id,
            version = snapshot.version,
            "session adopted snapshot"
        );
        self.snapshot = snapshot;
        self.pending = None;
    }

    /// Interpret one operator line (end-of-line already stripped).
    pub fn handle_line(&mut self, line: &str) -> ShellEffect {
        if self.terminated {
            return self.goodbye();
        }
        match self.step(line) {
            Ok((message, records)) => self.effect(message, records),
            Err(e) => {
                tracing::error!(session = self.id, error = %e, "shell fault; closing session");
                self.goodbye()
            }
        }
    }

    /// Apply new terminal dimensions (clamped to the supported range).
    pub fn handle_resize(&mut self, width: u16, height: u16) -> ShellEffect {
        let (profile, clamped) = self.profile.resized(width, height);
        if clamped {
            tracing::info!(session = self.id, width, height, "terminal size clamped");
        }
        self.profile = profile;
        self.effect(None, Vec::new())
    }

    /// Replace the whole terminal profile (kind or name changed).
    pub fn set_profile(&mut self, profile: TerminalProfile) -> ShellEffect {
        self.profile = profile;
        self.effect(None, Vec::new())
    }

    /// Redraw the current screen with a status message in the prompt row.
    pub fn notice(&mut self, message: &'static str) -> ShellEffect {
        self.effect(Some(message), Vec::new())
    }

    /// Redraw the current screen.
    pub fn redraw(&mut self) -> ShellEffect {
        self.effect(None, Vec::new())
    }

    /// End the session.
    pub fn goodbye(&mut self) -> ShellEffect {
        self.terminated = true;
        ShellEffect {
            frame: Frame::message(self.profile.width, self.profile.height, GOODBYE),
            records: Vec::new(),
            terminated: true,
        }
    }

    fn effect(&mut self, message: Option<&str>, records: Vec<DataRecord>) -> ShellEffect {
        match self.render(message) {
            Ok(frame) => ShellEffect {
                frame,
                records,
                terminated: false,
            },
            Err(e) => {
                tracing::error!(session = self.id, error = %e, "shell fault while rendering; closing session");
                let mut bye = self.goodbye();
                bye.records = records;
                bye
            }
        }
    }

    fn screen_def(&self, id: &str) -> Result<ScreenDef, LookupError> {
        self.snapshot
            .doc
            .screen(id)
            .cloned()
            .ok_or_else(|| fault(format!("screen `{id}`")))
    }

    fn flow_def(&self, id: &str) -> Result<Flow, LookupError> {
        self.snapshot
            .doc
            .flow(id)
            .cloned()
            .ok_or_else(|| fault(format!("flow `{id}`")))
    }

    fn render(&mut self, message: Option<&str>) -> Result<Frame, LookupError> {
        let screen = self.screen_def(self.current_screen())?;
        let geometry = paginate(screen.kind.entry_count(), &self.profile);
        let page = match self.nav.last_mut().expect("nav stack is never empty") {
            NavEntry::Menu { page, .. } => page,
            NavEntry::Flow(f) => &mut f.page,
        };
        *page = (*page).min(geometry.page_count - 1);
        let view = ScreenView {
            screen: &screen,
            bindings: &self.bindings,
            page: *page,
            message,
            active_field: self.input.field,
            entered: &self.input.values,
            selected: &self.multi_selected,
        };
        Ok(layout(&view, &self.profile))
    }

    fn turn_page(&mut self, forward: bool, entries: usize) {
        let geometry = paginate(entries, &self.profile);
        let page = match self.nav.last_mut().expect("nav stack is never empty") {
            NavEntry::Menu { page, .. } => page,
            NavEntry::Flow(f) => &mut f.page,
        };
        *page = if forward {
            (*page + 1).min(geometry.page_count - 1)
        } else {
            page.saturating_sub(1)
        };
    }

    fn record(&self, flow: &str, screen: &str, bindings: Bindings) -> DataRecord {
        DataRecord {
            session_id: self.id,
            timestamp: Utc::now(),
            flow: flow.to_string(),
            screen: screen.to_string(),
            bindings,
        }
    }

    /// Returns the prompt message for the next frame and any records.
    fn step(&mut self, line: &str) -> Result<(Option<&'static str>, Vec<DataRecord>), LookupError> {
        let screen = self.screen_def(self.current_screen())?;
        let trimmed = line.trim();
        let entries = screen.kind.entry_count();
        if matches!(trimmed, "<" | ">") && !matches!(screen.kind, ScreenKind::Input { .. }) {
            self.turn_page(trimmed == ">", entries);
            return Ok((None, Vec::new()));
        }

        let flow_id = match self.nav.last() {
            Some(NavEntry::Flow(f)) => f.flow.clone(),
            _ => return self.step_menu(&screen, trimmed),
        };

        let mut records = Vec::new();
        let outcome = match &screen.kind {
            ScreenKind::Menu { .. } => return Err(fault(format!("menu `{}` inside flow `{flow_id}`", screen.id))),
            ScreenKind::Info { .. } => match trimmed {
                "" => Outcome::Ok,
                "0" => Outcome::Back,
                _ => return Ok((Some(MSG_INVALID), records)),
            },
            ScreenKind::Input { fields } => {
                if line == "0" {
                    Outcome::Back
                } else {
                    let value = if line == "00" { "0" } else { line };
                    let field = fields
                        .get(self.input.field)
                        .ok_or_else(|| fault(format!("field {} of `{}`", self.input.field, screen.id)))?;
                    if let Err(msg) = check_field(field, value) {
                        return Ok((Some(msg), records));
                    }
                    self.input.values.push(value.to_string());
                    self.input.field += 1;
                    if self.input.field < fields.len() {
                        return Ok((None, records));
                    }
                    let collected: Bindings = fields
                        .iter()
                        .zip(self.input.values.drain(..))
                        .map(|(f, v)| (f.name.clone(), v))
                        .collect();
                    self.bindings.extend(collected.clone());
                    records.push(self.record(&flow_id, &screen.id, collected));
                    Outcome::Ok
                }
            }
            ScreenKind::SingleOption { var, options } => match trimmed {
                "0" => Outcome::Back,
                _ => match selection(trimmed).and_then(|k| options.get(k - 1)) {
                    Some(opt) => {
                        self.bindings.insert(var.clone(), opt.value.clone());
                        let collected = Bindings::from([(var.clone(), opt.value.clone())]);
                        records.push(self.record(&flow_id, &screen.id, collected));
                        Outcome::Value(opt.value.clone())
                    }
                    None => return Ok((Some(MSG_INVALID), records)),
                },
            },
            ScreenKind::MultiOption { var, options } => match trimmed {
                "0" => {
                    self.multi_selected.clear();
                    Outcome::Back
                }
                "" => {
                    let joined = options
                        .iter()
                        .filter(|o| self.multi_selected.contains(&o.value))
                        .map(|o| o.value.as_str())
                        .collect::<Vec<_>>()
                        .join(",");
                    self.bindings.insert(var.clone(), joined.clone());
                    records.push(self.record(&flow_id, &screen.id, Bindings::from([(var.clone(), joined)])));
                    Outcome::Ok
                }
                _ => match selection(trimmed).and_then(|k| options.get(k - 1)) {
                    Some(opt) => {
                        if !self.multi_selected.remove(&opt.value) {
                            self.multi_selected.insert(opt.value.clone());
                        }
                        return Ok((None, records));
                    }
                    None => return Ok((Some(MSG_INVALID), records)),
                },
            },
        };
        self.resolve(&flow_id, &screen.id, outcome)?;
        Ok((None, records))
    }

    fn step_menu(
        &mut self,
        screen: &ScreenDef,
        line: &str,
    ) -> Result<(Option<&'static str>, Vec<DataRecord>), LookupError> {
        let ScreenKind::Menu { items } = &screen.kind else {
            return Err(fault(format!("`{}` on menu stack is not a menu", screen.id)));
        };
        if line == "0" {
            if self.nav.len() > 1 {
                self.nav.pop();
                return Ok((None, Vec::new()));
            }
            return Ok((Some(MSG_AT_TOP), Vec::new()));
        }
        let Some(item) = selection(line).and_then(|k| items.get(k - 1)) else {
            return Ok((Some(MSG_INVALID), Vec::new()));
        };
        match &item.target {
            MenuTarget::Node(menu) => {
                let target = self.screen_def(menu)?;
                if !target.kind.is_menu() {
                    return Err(fault(format!("node target `{menu}` is not a menu")));
                }
                self.nav.push(NavEntry::Menu {
                    screen: menu.clone(),
                    page: 0,
                });
            }
            MenuTarget::Leaf(flow_id) => {
                let flow = self.flow_def(flow_id)?;
                self.screen_def(&flow.start)?;
                self.bindings.clear();
                self.enter_screen();
                self.nav.push(NavEntry::Flow(FlowEntry {
                    flow: flow.id.clone(),
                    steps: vec![flow.start.clone()],
                    page: 0,
                }));
            }
        }
        Ok((None, Vec::new()))
    }

    /// Reset per-screen state when a screen becomes current.
    fn enter_screen(&mut self) {
        self.input = InputProgress::default();
        self.multi_selected.clear();
        if let Some(NavEntry::Flow(f)) = self.nav.last_mut() {
            f.page = 0;
        }
    }

    fn resolve(&mut self, flow_id: &str, screen: &str, outcome: Outcome) -> Result<(), LookupError> {
        let flow = self.flow_def(flow_id)?;
        let mut next = flow.next(screen, &outcome).cloned();
        if next.is_none() && matches!(outcome, Outcome::Value(_)) {
            next = flow.next(screen, &Outcome::Ok).cloned();
        }
        if let Some(Next::Screen(target)) = &next {
            self.screen_def(target)?;
        }
        let Some(NavEntry::Flow(entry)) = self.nav.last_mut() else {
            return Err(fault("no active flow"));
        };
        // An explicit back transition may only move backwards (to an earlier
        // step, or out of the flow).
        if outcome == Outcome::Back {
            if let Some(Next::Screen(target)) = &next {
                if !entry.steps[..entry.steps.len() - 1].contains(target) {
                    next = None;
                }
            }
        }
        match next {
            Some(Next::Screen(target)) => {
                // Revisiting a screen unwinds to it so loops stay bounded.
                match entry.steps.iter().position(|s| *s == target) {
                    Some(i) => entry.steps.truncate(i + 1),
                    None => entry.steps.push(target),
                }
                self.enter_screen();
            }
            Some(Next::End) => self.end_flow(),
            None if outcome == Outcome::Back => {
                entry.steps.pop();
                if entry.steps.is_empty() {
                    self.end_flow();
                } else {
                    self.enter_screen();
                }
            }
            None => {
                return Err(fault(format!(
                    "flow `{flow_id}` has no `{outcome}` transition from `{screen}`"
                )))
            }
        }
        Ok(())
    }

    fn end_flow(&mut self) {
        if matches!(self.nav.last(), Some(NavEntry::Flow(_))) {
            self.nav.pop();
        }
        self.bindings.clear();
        self.multi_selected.clear();
        self.input = InputProgress::default();
        if let Some(pending) = self.pending.take() {
            self.adopt(pending);
        }
    }
}
