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

use std::collections::BTreeSet;

use super::{Frame, TerminalProfile};
use crate::flow::{substitute, Bindings, ScreenDef, ScreenKind};

/// Row budget for a list of `n` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PageGeometry {
    pub items_per_page: usize,
    pub page_count: usize,
}

impl PageGeometry {
    /// Zero-based indices of the entries shown on `page`.
    pub fn range(&self, page: usize, n: usize) -> std::ops::Range<usize> {
        let start = (page * self.items_per_page).min(n);
        start..(start + self.items_per_page).min(n)
    }
}

/// Title and hint rows are always reserved; a pagination row is added only
/// when the entries do not fit on one page.
pub fn paginate(n: usize, profile: &TerminalProfile) -> PageGeometry {
    let h = profile.height as usize;
    let single = h - 2;
    if n <= single {
        PageGeometry {
            items_per_page: single,
            page_count: 1,
        }
    } else {
        let per = h - 3;
        PageGeometry {
            items_per_page: per,
            page_count: n.div_ceil(per),
        }
    }
}

/// Everything needed to draw one screen in its current state.
#[derive(Debug, Clone, Copy)]
pub struct ScreenView<'a> {
    pub screen: &'a ScreenDef,
    pub bindings: &'a Bindings,
    pub page: usize,
    pub message: Option<&'a str>,
    /// Input screens: index of the field being typed.
    pub active_field: usize,
    /// Input screens: values of the fields before `active_field`.
    pub entered: &'a [String],
    /// Multi-option screens: currently toggled values.
    pub selected: &'a BTreeSet<String>,
}

impl<'a> ScreenView<'a> {
    /// A view with nothing typed, selected or flagged.
    pub fn new(screen: &'a ScreenDef, bindings: &'a Bindings) -> ScreenView<'a> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        ScreenView {
            screen,
            bindings,
            page: 0,
            message: None,
            active_field: 0,
            entered: &[],
            selected: &EMPTY,
        }
    }
}

fn hint(view: &ScreenView) -> &'static str {
    match &view.screen.kind {
        ScreenKind::Menu { .. } | ScreenKind::SingleOption { .. } | ScreenKind::Input { .. } => "0=Back",
        ScreenKind::Info { .. } => "ENTER=Continue",
        ScreenKind::MultiOption { .. } => "ENTER=Done 0=Back",
    }
}

/// Lay a screen out on a `profile`-sized grid.
///
/// Row 0 is the title, the last row is the hint/prompt row, and entries fill
/// the rows between. Menu and option entries keep their global 1-based
/// number on every page.
pub fn layout(view: &ScreenView, profile: &TerminalProfile) -> Frame {
    let (w, h) = (profile.width, profile.height);
    let mut frame = Frame::blank(w, h);
    if frame.set_row(0, &view.screen.title) {
        tracing::debug!(screen = %view.screen.id, "title truncated");
    }

    let mut input_cursor = None;
    let entries: Vec<String> = match &view.screen.kind {
        ScreenKind::Menu { items } => items
            .iter()
            .enumerate()
            .map(|(i, item)| format!("{} {}{}", i + 1, if item.is_node() { "+" } else { "" }, item.label))
            .collect(),
        ScreenKind::Info { lines } => lines.iter().map(|l| substitute(l, view.bindings)).collect(),
        ScreenKind::Input { fields } => fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let prefix = format!("{}: ", f.name);
                if i < view.active_field {
                    let value = view.entered.get(i).map(String::as_str).unwrap_or("");
                    if f.masked {
                        format!("{prefix}{}", "*".repeat(value.len()))
                    } else {
                        format!("{prefix}{value}")
                    }
                } else {
                    if i == view.active_field {
                        input_cursor = Some((i, prefix.len(), f.masked));
                    }
                    prefix
                }
            })
            .collect(),
        ScreenKind::SingleOption { options, .. } => options
            .iter()
            .enumerate()
            .map(|(i, o)| format!("{} {}", i + 1, o.label))
            .collect(),
        ScreenKind::MultiOption { options, .. } => options
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let mark = if view.selected.contains(&o.value) { 'X' } else { ' ' };
                format!("{} [{}] {}", i + 1, mark, o.label)
            })
            .collect(),
    };

    let geometry = paginate(entries.len(), profile);
    let page = match input_cursor {
        Some((field, ..)) => field / geometry.items_per_page,
        None => view.page.min(geometry.page_count - 1),
    };
    let range = geometry.range(page, entries.len());
    let first = range.start;
    for (row, entry) in entries[range].iter().enumerate() {
        frame.set_row(row + 1, entry);
    }
    if geometry.page_count > 1 {
        frame.set_row(
            h as usize - 2,
            &format!("<=Prev >=Next {}/{}", page + 1, geometry.page_count),
        );
    }

    let hint = hint(view);
    let prompt = match view.message {
        Some(msg) => format!("{msg} {hint}"),
        None => hint.to_string(),
    };
    frame.set_row(h as usize - 1, &prompt);

    match input_cursor {
        Some((field, col, masked)) => {
            frame.set_cursor((field - first + 1) as u16, col.min(u16::MAX as usize) as u16);
            frame.set_masked_cursor_field(masked);
        }
        None => frame.set_cursor(h - 1, (prompt.len() + 1).min(u16::MAX as usize) as u16),
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FieldDef, FieldKind, MenuItem, MenuTarget};
    use crate::render::TerminalKind;

    fn menu(title: &str, items: &[(&str, bool)]) -> ScreenDef {
        ScreenDef {
            id: title.to_lowercase(),
            title: title.into(),
            kind: ScreenKind::Menu {
                items: items
                    .iter()
                    .map(|(label, node)| MenuItem {
                        label: label.to_string(),
                        target: if *node {
                            MenuTarget::Node("x".into())
                        } else {
                            MenuTarget::Leaf("f".into())
                        },
                    })
                    .collect(),
            },
        }
    }

    fn trimmed(frame: &Frame) -> Vec<&str> {
        frame.trimmed_rows().collect()
    }

    #[test]
    fn main_menu_80x24() {
        let screen = menu("MAIN", &[("Receiving", true), ("Inventory", false), ("Shipping", true)]);
        let bindings = Bindings::new();
        let frame = layout(&ScreenView::new(&screen, &bindings), &TerminalProfile::default());
        let rows = trimmed(&frame);
        assert_eq!(&rows[..4], &["MAIN", "1 +Receiving", "2 Inventory", "3 +Shipping"]);
        assert!(rows[4..23].iter().all(|r| r.is_empty()));
        assert_eq!(rows[23], "0=Back");
        assert_eq!(frame.cursor(), (23, 7));
    }

    #[test]
    fn info_screen() {
        let screen = ScreenDef {
            id: "done".into(),
            title: "DONE".into(),
            kind: ScreenKind::Info {
                lines: vec!["Saved.".into()],
            },
        };
        let bindings = Bindings::new();
        let frame = layout(&ScreenView::new(&screen, &bindings), &TerminalProfile::default());
        let rows = trimmed(&frame);
        assert_eq!(rows[0], "DONE");
        assert_eq!(rows[1], "Saved.");
        assert_eq!(rows[23], "ENTER=Continue");
        assert_eq!(frame.cursor().0, 23);
    }

    /// Counts rows by walking the list one entry at a time.
    fn brute_pages(n: usize, height: usize) -> (usize, usize) {
        let mut rows_free = height - 2;
        if n <= rows_free {
            return (rows_free, 1);
        }
        rows_free = height - 3;
        let mut pages = 1;
        let mut used = 0;
        for _ in 0..n {
            if used == rows_free {
                pages += 1;
                used = 0;
            }
            used += 1;
        }
        (rows_free, pages)
    }

    #[test]
    fn pagination_geometry() {
        let big = TerminalProfile::default();
        let rf = TerminalProfile::rf();
        assert_eq!(
            paginate(3, &big),
            PageGeometry {
                items_per_page: 22,
                page_count: 1
            }
        );
        assert_eq!(
            paginate(0, &big),
            PageGeometry {
                items_per_page: 22,
                page_count: 1
            }
        );
        assert_eq!(
            paginate(30, &rf),
            PageGeometry {
                items_per_page: 13,
                page_count: 3
            }
        );
        for h in 4..40u16 {
            let p = TerminalProfile::new(20, h, TerminalKind::Ansi).unwrap();
            for n in 0..120 {
                let g = paginate(n, &p);
                assert_eq!(
                    (g.items_per_page, g.page_count),
                    brute_pages(n, h as usize),
                    "n={n} h={h}"
                );
            }
        }
    }

    #[test]
    fn thirty_items_second_page() {
        let labels: Vec<String> = (1..=30).map(|i| format!("Item{i}")).collect();
        let items: Vec<(&str, bool)> = labels.iter().map(|l| (l.as_str(), false)).collect();
        let screen = menu("BIG", &items);
        let bindings = Bindings::new();
        let mut view = ScreenView::new(&screen, &bindings);
        view.page = 1;
        let frame = layout(&view, &TerminalProfile::rf());
        let rows = trimmed(&frame);
        assert_eq!(rows[1], "14 Item14");
        assert_eq!(rows[13], "26 Item26");
        assert_eq!(rows[14], "<=Prev >=Next 2/3");
        assert_eq!(rows[15], "0=Back");
    }

    #[test]
    fn input_cursor_and_masking() {
        let screen = ScreenDef {
            id: "login".into(),
            title: "LOGIN".into(),
            kind: ScreenKind::Input {
                fields: vec![
                    FieldDef {
                        name: "pin".into(),
                        kind: FieldKind::Number,
                        required: true,
                        max_len: 4,
                        masked: true,
                    },
                    FieldDef {
                        name: "zone".into(),
                        kind: FieldKind::Text,
                        required: false,
                        max_len: 4,
                        masked: false,
                    },
                ],
            },
        };
        let bindings = Bindings::new();
        let entered = vec!["1234".to_string()];
        let mut view = ScreenView::new(&screen, &bindings);
        let first = layout(&view, &TerminalProfile::default());
        assert_eq!(first.cursor(), (1, 5));
        assert!(first.masked_cursor_field());
        view.active_field = 1;
        view.entered = &entered;
        let frame = layout(&view, &TerminalProfile::default());
        assert_eq!(frame.trimmed_rows().nth(1), Some("pin: ****"));
        assert_eq!(frame.cursor(), (2, 6));
        assert!(!frame.masked_cursor_field());
        assert_eq!(frame.trimmed_rows().last(), Some("0=Back"));
    }

    #[test]
    fn message_prefixes_hint() {
        let screen = menu("MAIN", &[("A", false)]);
        let bindings = Bindings::new();
        let mut view = ScreenView::new(&screen, &bindings);
        view.message = Some("INVALID");
        let frame = layout(&view, &TerminalProfile::default());
        assert_eq!(frame.trimmed_rows().last(), Some("INVALID 0=Back"));
    }
}
