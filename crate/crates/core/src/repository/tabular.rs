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

//! Table-backed repositories.
//!
//! Five UTF-8 files with a header row and `|` as the delimiter:
//!
//! | file              | columns                                          |
//! |-------------------|--------------------------------------------------|
//! | `screens.psv`     | `id|type|title|var|root`                         |
//! | `items.psv`       | `screen|seq|kind|label|target`                   |
//! | `fields.psv`      | `screen|seq|name|kind|required|max|masked`       |
//! | `flows.psv`       | `id|start`                                       |
//! | `transitions.psv` | `flow|screen|outcome|goto`                       |
//!
//! `items.kind` is `menu` (target = menu id), `flow` (target = flow id),
//! `option` (target = stored value) or `line` (label = info text, target
//! empty). Exactly one screen row has `root` = `true`. Values containing `|`
//! or quotes use standard CSV quoting.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use super::LoadError;
use crate::flow::{
    to_xml, FieldDef, FieldKind, Flow, MenuItem, MenuTarget, Next, OptionDef, Outcome, RepositoryDoc, ScreenDef,
    ScreenKind, Transition, END,
};

pub const SCREENS_FILE: &str = "screens.psv";
pub const ITEMS_FILE: &str = "items.psv";
pub const FIELDS_FILE: &str = "fields.psv";
pub const FLOWS_FILE: &str = "flows.psv";
pub const TRANSITIONS_FILE: &str = "transitions.psv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenRow {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub title: String,
    pub var: String,
    pub root: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemRow {
    pub screen: String,
    pub seq: u32,
    pub kind: String,
    pub label: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRow {
    pub screen: String,
    pub seq: u32,
    pub name: String,
    pub kind: String,
    pub required: bool,
    pub max: usize,
    pub masked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRow {
    pub id: String,
    pub start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub flow: String,
    pub screen: String,
    pub outcome: String,
    pub goto: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TabularSource {
    pub screens: Vec<ScreenRow>,
    pub items: Vec<ItemRow>,
    pub fields: Vec<FieldRow>,
    pub flows: Vec<FlowRow>,
    pub transitions: Vec<TransitionRow>,
}

/// `row` is the 1-based data row (the header is not counted).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("no screen row is marked as root")]
    NoRoot,
    #[error("{table} row {row}: {reason}")]
    DanglingKey {
        table: &'static str,
        row: usize,
        reason: String,
    },
    #[error("{table} row {row}: {reason}")]
    BadRow {
        table: &'static str,
        row: usize,
        reason: String,
    },
}

impl GenerateError {
    pub fn code(&self) -> &'static str {
        match self {
            GenerateError::NoRoot => "NoRoot",
            GenerateError::DanglingKey { .. } => "DanglingKey",
            GenerateError::BadRow { .. } => "BadRow",
        }
    }
}

fn read_table<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<Vec<T>, LoadError> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path).map_err(|source| LoadError::Io {
        path: path.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().delimiter(b'|').from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.map_err(|e| LoadError::Table {
            file: path.clone(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}

fn write_table<T: Serialize>(dir: &Path, name: &str, rows: &[T], header: &[&str]) -> std::io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .delimiter(b'|')
        .has_headers(false)
        .from_path(dir.join(name))?;
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()
}

impl TabularSource {
    pub fn read_dir(dir: &Path) -> Result<TabularSource, LoadError> {
        Ok(TabularSource {
            screens: read_table(dir, SCREENS_FILE)?,
            items: read_table(dir, ITEMS_FILE)?,
            fields: read_table(dir, FIELDS_FILE)?,
            flows: read_table(dir, FLOWS_FILE)?,
            transitions: read_table(dir, TRANSITIONS_FILE)?,
        })
    }

    /// Write all five tables, headers included.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        write_table(
            dir,
            SCREENS_FILE,
            &self.screens,
            &["id", "type", "title", "var", "root"],
        )?;
        write_table(
            dir,
            ITEMS_FILE,
            &self.items,
            &["screen", "seq", "kind", "label", "target"],
        )?;
        write_table(
            dir,
            FIELDS_FILE,
            &self.fields,
            &["screen", "seq", "name", "kind", "required", "max", "masked"],
        )?;
        write_table(dir, FLOWS_FILE, &self.flows, &["id", "start"])?;
        write_table(
            dir,
            TRANSITIONS_FILE,
            &self.transitions,
            &["flow", "screen", "outcome", "goto"],
        )
    }

    /// Build the document the tables describe, in canonical order.
    pub fn to_doc(&self) -> Result<RepositoryDoc, GenerateError> {
        let dangling = |table, row: usize, reason: String| GenerateError::DanglingKey {
            table,
            row: row + 1,
            reason,
        };
        let bad = |table, row: usize, reason: String| GenerateError::BadRow {
            table,
            row: row + 1,
            reason,
        };

        let roots: Vec<&ScreenRow> = self.screens.iter().filter(|s| s.root).collect();
        let root = match roots.as_slice() {
            [] => return Err(GenerateError::NoRoot),
            [one] => one.id.clone(),
            [_, second, ..] => {
                let row = self.screens.iter().position(|s| std::ptr::eq(s, *second)).unwrap_or(0);
                return Err(bad("screens", row, "more than one root screen".into()));
            }
        };

        let screen_types: BTreeMap<&str, &str> =
            self.screens.iter().map(|s| (s.id.as_str(), s.kind.as_str())).collect();
        let flow_ids: BTreeSet<&str> = self.flows.iter().map(|f| f.id.as_str()).collect();

        let mut items: BTreeMap<&str, Vec<(u32, &ItemRow)>> = BTreeMap::new();
        for (i, item) in self.items.iter().enumerate() {
            let Some(&ty) = screen_types.get(item.screen.as_str()) else {
                return Err(dangling("items", i, format!("screen `{}` does not exist", item.screen)));
            };
            let fits = match item.kind.as_str() {
                "menu" => {
                    if !screen_types.contains_key(item.target.as_str()) {
                        return Err(dangling("items", i, format!("menu `{}` does not exist", item.target)));
                    }
                    ty == "menu"
                }
                "flow" => {
                    if !flow_ids.contains(item.target.as_str()) {
                        return Err(dangling("items", i, format!("flow `{}` does not exist", item.target)));
                    }
                    ty == "menu"
                }
                "option" => ty == "single" || ty == "multi",
                "line" => ty == "info",
                other => return Err(bad("items", i, format!("unknown item kind `{other}`"))),
            };
            if !fits {
                return Err(bad("items", i, format!("`{}` item on {ty} screen", item.kind)));
            }
            items.entry(item.screen.as_str()).or_default().push((item.seq, item));
        }

        let mut fields: BTreeMap<&str, Vec<(u32, usize, &FieldRow)>> = BTreeMap::new();
        for (i, field) in self.fields.iter().enumerate() {
            match screen_types.get(field.screen.as_str()) {
                None => {
                    return Err(dangling(
                        "fields",
                        i,
                        format!("screen `{}` does not exist", field.screen),
                    ))
                }
                Some(&"input") => {}
                Some(ty) => return Err(bad("fields", i, format!("field on {ty} screen"))),
            }
            fields
                .entry(field.screen.as_str())
                .or_default()
                .push((field.seq, i, field));
        }

        let mut screens = Vec::with_capacity(self.screens.len());
        let mut ordered: Vec<(usize, &ScreenRow)> = self.screens.iter().enumerate().collect();
        ordered.sort_by(|a, b| a.1.id.cmp(&b.1.id));
        for (i, row) in ordered {
            let mut its = items.remove(row.id.as_str()).unwrap_or_default();
            its.sort_by_key(|(seq, _)| *seq);
            let kind = match row.kind.as_str() {
                "menu" => ScreenKind::Menu {
                    items: its
                        .iter()
                        .map(|(_, it)| MenuItem {
                            label: it.label.clone(),
                            target: if it.kind == "menu" {
                                MenuTarget::Node(it.target.clone())
                            } else {
                                MenuTarget::Leaf(it.target.clone())
                            },
                        })
                        .collect(),
                },
                "info" => ScreenKind::Info {
                    lines: its.iter().map(|(_, it)| it.label.clone()).collect(),
                },
                "input" => {
                    let mut fs = fields.remove(row.id.as_str()).unwrap_or_default();
                    fs.sort_by_key(|(seq, ..)| *seq);
                    let mut out = Vec::with_capacity(fs.len());
                    for (_, row, f) in fs {
                        let kind = match f.kind.as_str() {
                            "text" => FieldKind::Text,
                            "number" => FieldKind::Number,
                            other => return Err(bad("fields", row, format!("unknown field kind `{other}`"))),
                        };
                        out.push(FieldDef {
                            name: f.name.clone(),
                            kind,
                            required: f.required,
                            max_len: f.max,
                            masked: f.masked,
                        });
                    }
                    ScreenKind::Input { fields: out }
                }
                "single" | "multi" => {
                    let options = its
                        .iter()
                        .map(|(_, it)| OptionDef {
                            label: it.label.clone(),
                            value: it.target.clone(),
                        })
                        .collect();
                    if row.kind == "single" {
                        ScreenKind::SingleOption {
                            var: row.var.clone(),
                            options,
                        }
                    } else {
                        ScreenKind::MultiOption {
                            var: row.var.clone(),
                            options,
                        }
                    }
                }
                other => return Err(bad("screens", i, format!("unknown screen type `{other}`"))),
            };
            screens.push(ScreenDef {
                id: row.id.clone(),
                title: row.title.clone(),
                kind,
            });
        }

        let mut transitions: BTreeMap<&str, Vec<Transition>> = BTreeMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if !flow_ids.contains(t.flow.as_str()) {
                return Err(dangling("transitions", i, format!("flow `{}` does not exist", t.flow)));
            }
            if !screen_types.contains_key(t.screen.as_str()) {
                return Err(dangling(
                    "transitions",
                    i,
                    format!("screen `{}` does not exist", t.screen),
                ));
            }
            let next = if t.goto == END {
                Next::End
            } else if screen_types.contains_key(t.goto.as_str()) {
                Next::Screen(t.goto.clone())
            } else {
                return Err(dangling("transitions", i, format!("goto `{}` does not exist", t.goto)));
            };
            transitions.entry(t.flow.as_str()).or_default().push(Transition {
                screen: t.screen.clone(),
                outcome: Outcome::parse(&t.outcome),
                next,
            });
        }

        let mut flows = Vec::with_capacity(self.flows.len());
        let mut ordered: Vec<(usize, &FlowRow)> = self.flows.iter().enumerate().collect();
        ordered.sort_by(|a, b| a.1.id.cmp(&b.1.id));
        for (i, row) in ordered {
            if !screen_types.contains_key(row.start.as_str()) {
                return Err(dangling("flows", i, format!("start `{}` does not exist", row.start)));
            }
            flows.push(Flow {
                id: row.id.clone(),
                start: row.start.clone(),
                transitions: transitions.remove(row.id.as_str()).unwrap_or_default(),
            });
        }

        Ok(RepositoryDoc::new(root, screens, flows).canonicalized())
    }

    /// Tables describing `doc`. Inverse of [`TabularSource::to_doc`] up to
    /// canonical ordering.
    pub fn from_doc(doc: &RepositoryDoc) -> TabularSource {
        let mut t = TabularSource::default();
        for s in doc.screens() {
            let var = match &s.kind {
                ScreenKind::SingleOption { var, .. } | ScreenKind::MultiOption { var, .. } => var.clone(),
                _ => String::new(),
            };
            t.screens.push(ScreenRow {
                id: s.id.clone(),
                kind: s.kind.type_name().into(),
                title: s.title.clone(),
                var,
                root: s.id == doc.root_menu(),
            });
            let item = |seq: usize, kind: &str, label: &str, target: &str| ItemRow {
                screen: s.id.clone(),
                seq: seq as u32 + 1,
                kind: kind.into(),
                label: label.into(),
                target: target.into(),
            };
            match &s.kind {
                ScreenKind::Menu { items } => {
                    for (i, it) in items.iter().enumerate() {
                        t.items.push(match &it.target {
                            MenuTarget::Node(m) => item(i, "menu", &it.label, m),
                            MenuTarget::Leaf(f) => item(i, "flow", &it.label, f),
                        });
                    }
                }
                ScreenKind::Info { lines } => {
                    for (i, l) in lines.iter().enumerate() {
                        t.items.push(item(i, "line", l, ""));
                    }
                }
                ScreenKind::SingleOption { options, .. } | ScreenKind::MultiOption { options, .. } => {
                    for (i, o) in options.iter().enumerate() {
                        t.items.push(item(i, "option", &o.label, &o.value));
                    }
                }
                ScreenKind::Input { fields } => {
                    for (i, f) in fields.iter().enumerate() {
                        t.fields.push(FieldRow {
                            screen: s.id.clone(),
                            seq: i as u32 + 1,
                            name: f.name.clone(),
                            kind: f.kind.as_str().into(),
                            required: f.required,
                            max: f.max_len,
                            masked: f.masked,
                        });
                    }
                }
            }
        }
        for f in doc.flows() {
            t.flows.push(FlowRow {
                id: f.id.clone(),
                start: f.start.clone(),
            });
            for tr in &f.transitions {
                t.transitions.push(TransitionRow {
                    flow: f.id.clone(),
                    screen: tr.screen.clone(),
                    outcome: tr.outcome.as_str().into(),
                    goto: match &tr.next {
                        Next::End => END.into(),
                        Next::Screen(s) => s.clone(),
                    },
                });
            }
        }
        t
    }
}

/// Canonical XML for the tables: screens and flows sorted by id, items and
/// fields by `seq`, transitions by `(screen, outcome)`.
pub fn generate_xml(source: &TabularSource) -> Result<String, GenerateError> {
    Ok(to_xml(&source.to_doc()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tables_have_no_root() {
        assert_eq!(generate_xml(&TabularSource::default()), Err(GenerateError::NoRoot));
    }

    #[test]
    fn item_pointing_at_missing_flow() {
        let t = TabularSource {
            screens: vec![ScreenRow {
                id: "main".into(),
                kind: "menu".into(),
                title: "MAIN".into(),
                var: String::new(),
                root: true,
            }],
            items: vec![ItemRow {
                screen: "main".into(),
                seq: 1,
                kind: "flow".into(),
                label: "Go".into(),
                target: "nope".into(),
            }],
            ..TabularSource::default()
        };
        match generate_xml(&t) {
            Err(GenerateError::DanglingKey {
                table: "items", row: 1, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tables_round_trip_through_files() {
        let t = TabularSource {
            screens: vec![ScreenRow {
                id: "main".into(),
                kind: "menu".into(),
                title: "A | quoted \"title\"".into(),
                var: String::new(),
                root: true,
            }],
            ..TabularSource::default()
        };
        let dir = tempfile::tempdir().unwrap();
        t.write_dir(dir.path()).unwrap();
        assert_eq!(TabularSource::read_dir(dir.path()).unwrap(), t);
    }
}
