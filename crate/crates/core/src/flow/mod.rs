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

//! Screen and flow definitions.
//!
//! A repository document declares screens of five kinds (menu, info, input,
//! single option, multi option) and flows that chain non-menu screens together
//! by outcome. Menus form a tree: a *node* item opens another menu, a *leaf*
//! item starts a flow.

mod parse;
mod template;
mod validate;
mod xml;

use std::collections::BTreeMap;
use std::fmt;

pub use parse::{parse, ParseError, ParseErrorCode};
pub use template::{substitute, substitute_checked};
pub use validate::{validate, ValidationReport, Violation, ViolationCode, Warning};
pub use xml::to_xml;

/// Variable name to value.
pub type Bindings = BTreeMap<String, String>;

/// Largest item or option count a screen may carry (two-digit selection).
pub const MAX_ITEMS: usize = 99;

/// Reserved `goto` target that ends a flow.
pub const END: &str = "end";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreenDef {
    pub id: String,
    pub title: String,
    pub kind: ScreenKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScreenKind {
    Menu { items: Vec<MenuItem> },
    Info { lines: Vec<String> },
    Input { fields: Vec<FieldDef> },
    SingleOption { var: String, options: Vec<OptionDef> },
    MultiOption { var: String, options: Vec<OptionDef> },
}

impl ScreenKind {
    /// The `type` attribute value for this kind.
    pub fn type_name(&self) -> &'static str {
        match self {
            ScreenKind::Menu { .. } => "menu",
            ScreenKind::Info { .. } => "info",
            ScreenKind::Input { .. } => "input",
            ScreenKind::SingleOption { .. } => "single",
            ScreenKind::MultiOption { .. } => "multi",
        }
    }

    pub fn is_menu(&self) -> bool {
        matches!(self, ScreenKind::Menu { .. })
    }

    /// Number of selectable / renderable entries (items, lines, fields, options).
    pub fn entry_count(&self) -> usize {
        match self {
            ScreenKind::Menu { items } => items.len(),
            ScreenKind::Info { lines } => lines.len(),
            ScreenKind::Input { fields } => fields.len(),
            ScreenKind::SingleOption { options, .. } | ScreenKind::MultiOption { options, .. } => options.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MenuItem {
    pub label: String,
    pub target: MenuTarget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MenuTarget {
    /// Opens another menu screen.
    Node(String),
    /// Starts a flow.
    Leaf(String),
}

impl MenuItem {
    pub fn is_node(&self) -> bool {
        matches!(self.target, MenuTarget::Node(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Text,
    Number,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::Text => "text",
            FieldKind::Number => "number",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDef {
    pub name: String,
    pub kind: FieldKind,
    pub required: bool,
    pub max_len: usize,
    pub masked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionDef {
    pub label: String,
    pub value: String,
}

/// Result of completing or leaving a screen, used to pick the next step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Ok,
    Back,
    Cancel,
    /// A single-option value; falls back to `Ok` when no transition matches.
    Value(String),
}

impl Outcome {
    pub fn parse(token: &str) -> Outcome {
        match token {
            "ok" => Outcome::Ok,
            "back" => Outcome::Back,
            "cancel" => Outcome::Cancel,
            other => Outcome::Value(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Back => "back",
            Outcome::Cancel => "cancel",
            Outcome::Value(v) => v,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Next {
    Screen(String),
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub screen: String,
    pub outcome: Outcome,
    pub next: Next,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub id: String,
    pub start: String,
    pub transitions: Vec<Transition>,
}

impl Flow {
    /// First transition for `(screen, outcome)`.
    pub fn next(&self, screen: &str, outcome: &Outcome) -> Option<&Next> {
        self.transitions
            .iter()
            .find(|t| t.screen == screen && &t.outcome == outcome)
            .map(|t| &t.next)
    }
}

/// A parsed repository: screens and flows in declaration order, plus the
/// id of the root menu.
#[derive(Debug, Clone)]
pub struct RepositoryDoc {
    root_menu: String,
    screens: Vec<ScreenDef>,
    flows: Vec<Flow>,
    screen_index: BTreeMap<String, usize>,
    flow_index: BTreeMap<String, usize>,
}

impl PartialEq for RepositoryDoc {
    fn eq(&self, other: &Self) -> bool {
        self.root_menu == other.root_menu && self.screens == other.screens && self.flows == other.flows
    }
}

impl Eq for RepositoryDoc {}

impl RepositoryDoc {
    pub fn new(root_menu: impl Into<String>, screens: Vec<ScreenDef>, flows: Vec<Flow>) -> RepositoryDoc {
        let mut screen_index = BTreeMap::new();
        for (i, s) in screens.iter().enumerate() {
            screen_index.entry(s.id.clone()).or_insert(i);
        }
        let mut flow_index = BTreeMap::new();
        for (i, f) in flows.iter().enumerate() {
            flow_index.entry(f.id.clone()).or_insert(i);
        }
        RepositoryDoc {
            root_menu: root_menu.into(),
            screens,
            flows,
            screen_index,
            flow_index,
        }
    }

    pub fn root_menu(&self) -> &str {
        &self.root_menu
    }

    pub fn screens(&self) -> &[ScreenDef] {
        &self.screens
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn screen(&self, id: &str) -> Option<&ScreenDef> {
        self.screen_index.get(id).map(|&i| &self.screens[i])
    }

    pub fn flow(&self, id: &str) -> Option<&Flow> {
        self.flow_index.get(id).map(|&i| &self.flows[i])
    }

    /// Concatenate several documents. Duplicates are kept so that
    /// [`validate`] can report them.
    pub fn merge(root_menu: impl Into<String>, docs: impl IntoIterator<Item = RepositoryDoc>) -> RepositoryDoc {
        let mut screens = Vec::new();
        let mut flows = Vec::new();
        for doc in docs {
            screens.extend(doc.screens);
            flows.extend(doc.flows);
        }
        RepositoryDoc::new(root_menu, screens, flows)
    }

    /// Same model with screens and flows sorted by id and transitions sorted
    /// by `(screen, outcome)`.
    pub fn canonicalized(&self) -> RepositoryDoc {
        let mut screens = self.screens.clone();
        screens.sort_by(|a, b| a.id.cmp(&b.id));
        let mut flows = self.flows.clone();
        flows.sort_by(|a, b| a.id.cmp(&b.id));
        for flow in &mut flows {
            flow.transitions
                .sort_by(|a, b| (&a.screen, a.outcome.as_str()).cmp(&(&b.screen, b.outcome.as_str())));
        }
        RepositoryDoc::new(self.root_menu.clone(), screens, flows)
    }
}

/// `[A-Za-z0-9_.-]+`, and not the reserved word `end`.
pub fn is_valid_id(s: &str) -> bool {
    !s.is_empty() && s != END && s.bytes().all(|b| b.is_ascii_alphanumeric() || b"_.-".contains(&b))
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_valid_var(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Option values end up comma-joined for multi-option screens, so commas
/// and whitespace are excluded.
pub fn is_valid_value(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b"_.-/".contains(&b))
}
