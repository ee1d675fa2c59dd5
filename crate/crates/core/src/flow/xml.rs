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

use std::fmt::Write;

use super::*;

fn escape(s: &str, attr: bool) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attr => out.push_str("&quot;"),
            // Attribute value normalization would turn these into spaces.
            '\t' if attr => out.push_str("&#9;"),
            '\n' if attr => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

/// Serialize to the canonical document form: two-space indentation, fixed
/// attribute order, every field attribute spelled out. Declaration order is
/// kept; call [`RepositoryDoc::canonicalized`] first for id order.
pub fn to_xml(doc: &RepositoryDoc) -> String {
    let mut out = String::new();
    let a = |s: &str| escape(s, true);
    let _ = writeln!(out, "<uim root=\"{}\">", a(doc.root_menu()));
    for screen in doc.screens() {
        let var = match &screen.kind {
            ScreenKind::SingleOption { var, .. } | ScreenKind::MultiOption { var, .. } => {
                format!(" var=\"{}\"", a(var))
            }
            _ => String::new(),
        };
        let _ = write!(
            out,
            "  <screen type=\"{}\" id=\"{}\" title=\"{}\"{}",
            screen.kind.type_name(),
            a(&screen.id),
            a(&screen.title),
            var
        );
        if screen.kind.entry_count() == 0 {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        match &screen.kind {
            ScreenKind::Menu { items } => {
                for item in items {
                    let (attr, target) = match &item.target {
                        MenuTarget::Leaf(f) => ("flow", f),
                        MenuTarget::Node(m) => ("menu", m),
                    };
                    let _ = writeln!(
                        out,
                        "    <item label=\"{}\" {}=\"{}\"/>",
                        a(&item.label),
                        attr,
                        a(target)
                    );
                }
            }
            ScreenKind::Info { lines } => {
                for line in lines {
                    if line.is_empty() {
                        out.push_str("    <line/>\n");
                    } else {
                        let _ = writeln!(out, "    <line>{}</line>", escape(line, false));
                    }
                }
            }
            ScreenKind::Input { fields } => {
                for f in fields {
                    let _ = writeln!(
                        out,
                        "    <field name=\"{}\" kind=\"{}\" required=\"{}\" max=\"{}\" masked=\"{}\"/>",
                        a(&f.name),
                        f.kind.as_str(),
                        f.required,
                        f.max_len,
                        f.masked
                    );
                }
            }
            ScreenKind::SingleOption { options, .. } | ScreenKind::MultiOption { options, .. } => {
                for o in options {
                    let _ = writeln!(out, "    <option label=\"{}\" value=\"{}\"/>", a(&o.label), a(&o.value));
                }
            }
        }
        out.push_str("  </screen>\n");
    }
    for flow in doc.flows() {
        let _ = write!(out, "  <flow id=\"{}\" start=\"{}\"", a(&flow.id), a(&flow.start));
        if flow.transitions.is_empty() {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        for t in &flow.transitions {
            let goto = match &t.next {
                Next::End => END,
                Next::Screen(s) => s.as_str(),
            };
            let _ = writeln!(
                out,
                "    <on screen=\"{}\" outcome=\"{}\" goto=\"{}\"/>",
                a(&t.screen),
                a(t.outcome.as_str()),
                a(goto)
            );
        }
        out.push_str("  </flow>\n");
    }
    out.push_str("</uim>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_round_trip() {
        let doc = RepositoryDoc::new(
            "m",
            vec![
                ScreenDef {
                    id: "m".into(),
                    title: "A \"quoted\" <title> & \tmore\n".into(),
                    kind: ScreenKind::Menu {
                        items: vec![MenuItem {
                            label: "x&y".into(),
                            target: MenuTarget::Leaf("f".into()),
                        }],
                    },
                },
                ScreenDef {
                    id: "i".into(),
                    title: "I".into(),
                    kind: ScreenKind::Info {
                        lines: vec!["  a < b  ".into(), String::new(), "cr\rhere".into()],
                    },
                },
            ],
            vec![Flow {
                id: "f".into(),
                start: "i".into(),
                transitions: vec![],
            }],
        );
        let text = to_xml(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
    }
}
