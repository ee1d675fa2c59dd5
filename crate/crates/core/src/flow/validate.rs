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

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationCode {
    DanglingRef,
    DuplicateId,
    MenuCycle,
    EmptyScreen,
    TooManyItems,
    MissingOkTransition,
    NodeTargetsNonMenu,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// Screen or flow id the violation is reported against.
    pub at: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.at, self.message)
    }
}

/// Non-fatal findings: unreachable screens and unreferenced flows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub at: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    fn push(&mut self, code: ViolationCode, at: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            code,
            at: at.to_string(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {}: {}", w.at, w.message)?;
        }
        Ok(())
    }
}

fn duplicates<T: Ord + Clone>(ids: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    let mut dups = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.clone()) {
            dups.insert(id);
        }
    }
    dups.into_iter().collect()
}

/// Check every cross-reference and structural rule of a repository.
pub fn validate(doc: &RepositoryDoc) -> ValidationReport {
    use ViolationCode::*;
    let mut report = ValidationReport::default();

    for id in duplicates(doc.screens().iter().map(|s| s.id.as_str())) {
        report.push(DuplicateId, id, format!("screen `{id}` is defined more than once"));
    }
    for id in duplicates(doc.flows().iter().map(|f| f.id.as_str())) {
        report.push(DuplicateId, id, format!("flow `{id}` is defined more than once"));
    }

    match doc.screen(doc.root_menu()) {
        None => report.push(DanglingRef, doc.root_menu(), "root menu does not exist"),
        Some(s) if !s.kind.is_menu() => report.push(NodeTargetsNonMenu, doc.root_menu(), "root is not a menu screen"),
        Some(_) => {}
    }

    for screen in doc.screens() {
        let id = screen.id.as_str();
        let count = screen.kind.entry_count();
        let needs_entries = !matches!(screen.kind, ScreenKind::Info { .. });
        if needs_entries && count == 0 {
            report.push(
                EmptyScreen,
                id,
                format!("{} screen has no entries", screen.kind.type_name()),
            );
        }
        match &screen.kind {
            ScreenKind::Menu { items } => {
                if items.len() > MAX_ITEMS {
                    report.push(TooManyItems, id, format!("{} items, at most {MAX_ITEMS}", items.len()));
                }
                for item in items {
                    match &item.target {
                        MenuTarget::Node(target) => match doc.screen(target) {
                            None => report.push(
                                DanglingRef,
                                id,
                                format!("item `{}` opens missing menu `{target}`", item.label),
                            ),
                            Some(t) if !t.kind.is_menu() => report.push(
                                NodeTargetsNonMenu,
                                id,
                                format!("item `{}` targets {} screen `{target}`", item.label, t.kind.type_name()),
                            ),
                            Some(_) => {}
                        },
                        MenuTarget::Leaf(flow) => {
                            if doc.flow(flow).is_none() {
                                report.push(
                                    DanglingRef,
                                    id,
                                    format!("item `{}` starts missing flow `{flow}`", item.label),
                                );
                            }
                        }
                    }
                }
            }
            ScreenKind::Input { fields } => {
                for name in duplicates(fields.iter().map(|f| f.name.as_str())) {
                    report.push(DuplicateId, id, format!("field `{name}` repeats"));
                }
            }
            ScreenKind::SingleOption { options, .. } | ScreenKind::MultiOption { options, .. } => {
                if options.len() > MAX_ITEMS {
                    report.push(
                        TooManyItems,
                        id,
                        format!("{} options, at most {MAX_ITEMS}", options.len()),
                    );
                }
                for value in duplicates(options.iter().map(|o| o.value.as_str())) {
                    report.push(DuplicateId, id, format!("option value `{value}` repeats"));
                }
            }
            ScreenKind::Info { .. } => {}
        }
    }

    for at in menu_cycles(doc) {
        report.push(MenuCycle, &at, "menu is reachable from itself");
    }

    for flow in doc.flows() {
        check_flow(doc, flow, &mut report);
    }

    report.warnings = orphans(doc);
    report
}

fn check_flow(doc: &RepositoryDoc, flow: &Flow, report: &mut ValidationReport) {
    use ViolationCode::*;
    let fid = flow.id.as_str();
    let flow_screen = |id: &str| doc.screen(id).filter(|s| !s.kind.is_menu());

    if flow_screen(&flow.start).is_none() {
        report.push(
            DanglingRef,
            fid,
            format!("start `{}` is not a non-menu screen", flow.start),
        );
    }
    for (screen, outcome) in duplicates(flow.transitions.iter().map(|t| (t.screen.as_str(), t.outcome.as_str()))) {
        report.push(DuplicateId, fid, format!("transition `{screen}` / `{outcome}` repeats"));
    }
    for t in &flow.transitions {
        match flow_screen(&t.screen) {
            None => report.push(
                DanglingRef,
                fid,
                format!("transition from unknown screen `{}`", t.screen),
            ),
            Some(screen) => {
                if let Outcome::Value(v) = &t.outcome {
                    let known = match &screen.kind {
                        ScreenKind::SingleOption { options, .. } => options.iter().any(|o| &o.value == v),
                        _ => false,
                    };
                    if !known {
                        report.push(
                            DanglingRef,
                            fid,
                            format!("outcome `{v}` is not an option of `{}`", t.screen),
                        );
                    }
                }
            }
        }
        if let Next::Screen(target) = &t.next {
            if flow_screen(target).is_none() {
                report.push(DanglingRef, fid, format!("goto `{target}` is not a non-menu screen"));
            }
        }
    }

    // Every screen the flow can reach needs an `ok` exit.
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([flow.start.as_str()]);
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id) || flow_screen(id).is_none() {
            continue;
        }
        if flow.next(id, &Outcome::Ok).is_none() {
            report.push(
                MissingOkTransition,
                fid,
                format!("screen `{id}` has no `ok` transition"),
            );
        }
        for t in flow.transitions.iter().filter(|t| t.screen == id) {
            if let Next::Screen(next) = &t.next {
                queue.push_back(next);
            }
        }
    }
}

/// Menus at which a node edge closes a cycle.
fn menu_cycles(doc: &RepositoryDoc) -> Vec<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let edges: BTreeMap<&str, Vec<&str>> = doc
        .screens()
        .iter()
        .filter_map(|s| match &s.kind {
            ScreenKind::Menu { items } => Some((
                s.id.as_str(),
                items
                    .iter()
                    .filter_map(|i| match &i.target {
                        MenuTarget::Node(t) => Some(t.as_str()),
                        MenuTarget::Leaf(_) => None,
                    })
                    .collect(),
            )),
            _ => None,
        })
        .collect();
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    let mut cycles = BTreeSet::new();
    for &start in edges.keys() {
        if marks.contains_key(start) {
            continue;
        }
        // Iterative DFS: (menu, next edge index).
        let mut stack = vec![(start, 0usize)];
        marks.insert(start, Mark::Active);
        while let Some(&mut (menu, ref mut next)) = stack.last_mut() {
            let targets = &edges[menu];
            if *next < targets.len() {
                let target = targets[*next];
                *next += 1;
                if !edges.contains_key(target) {
                    continue;
                }
                match marks.get(target) {
                    Some(Mark::Active) => {
                        cycles.insert(target.to_string());
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(target, Mark::Active);
                        stack.push((target, 0));
                    }
                }
            } else {
                marks.insert(menu, Mark::Done);
                stack.pop();
            }
        }
    }
    cycles.into_iter().collect()
}

fn orphans(doc: &RepositoryDoc) -> Vec<Warning> {
    let mut menus = BTreeSet::new();
    let mut flows = BTreeSet::new();
    let mut stack = vec![doc.root_menu()];
    while let Some(id) = stack.pop() {
        if !menus.insert(id) {
            continue;
        }
        if let Some(ScreenDef {
            kind: ScreenKind::Menu { items },
            ..
        }) = doc.screen(id)
        {
            for item in items {
                match &item.target {
                    MenuTarget::Node(t) => stack.push(t),
                    MenuTarget::Leaf(f) => {
                        flows.insert(f.as_str());
                    }
                }
            }
        }
    }
    let mut used_screens = menus.clone();
    for flow in doc.flows().iter().filter(|f| flows.contains(f.id.as_str())) {
        used_screens.insert(flow.start.as_str());
        for t in &flow.transitions {
            used_screens.insert(t.screen.as_str());
            if let Next::Screen(s) = &t.next {
                used_screens.insert(s.as_str());
            }
        }
    }
    let mut warnings = Vec::new();
    for s in doc.screens() {
        if !used_screens.contains(s.id.as_str()) {
            warnings.push(Warning {
                at: s.id.clone(),
                message: "screen is not reachable from the root menu".into(),
            });
        }
    }
    for f in doc.flows() {
        if !flows.contains(f.id.as_str()) {
            warnings.push(Warning {
                at: f.id.clone(),
                message: "flow is not started by any reachable menu item".into(),
            });
        }
    }
    warnings
}
