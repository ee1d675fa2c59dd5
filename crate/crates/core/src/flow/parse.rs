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

//! Strict reader for the repository XML format.
//!
//! Unknown elements and attributes, non-whitespace text outside `<line>`,
//! namespaces and DTDs are all rejected with a position.

use std::fmt;

use roxmltree::{Document, Node, NodeType, ParsingOptions};
use thiserror::Error;

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ParseErrorCode {
    XmlSyntax,
    UnknownElement,
    MissingAttr,
    BadAttrValue,
}

impl fmt::Display for ParseErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Position is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error, serde::Serialize)]
#[error("{line}:{column}: {code}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub code: ParseErrorCode,
    pub message: String,
}

struct Ctx<'a> {
    doc: &'a Document<'a>,
}

impl<'a> Ctx<'a> {
    fn err(&self, node: Node, code: ParseErrorCode, message: impl Into<String>) -> ParseError {
        let pos = self.doc.text_pos_at(node.range().start);
        ParseError {
            line: pos.row,
            column: pos.col,
            code,
            message: message.into(),
        }
    }

    /// Reject attributes outside `allowed`.
    fn check_attrs(&self, node: Node, allowed: &[&str]) -> Result<(), ParseError> {
        for attr in node.attributes() {
            if attr.namespace().is_some() || !allowed.contains(&attr.name()) {
                return Err(self.err(
                    node,
                    ParseErrorCode::UnknownElement,
                    format!("unknown attribute `{}` on <{}>", attr.name(), node.tag_name().name()),
                ));
            }
        }
        Ok(())
    }

    fn required(&self, node: Node<'a, 'a>, name: &str) -> Result<&'a str, ParseError> {
        node.attribute(name).ok_or_else(|| {
            self.err(
                node,
                ParseErrorCode::MissingAttr,
                format!("<{}> requires attribute `{}`", node.tag_name().name(), name),
            )
        })
    }

    fn id(&self, node: Node<'a, 'a>, name: &str) -> Result<String, ParseError> {
        let v = self.required(node, name)?;
        if is_valid_id(v) {
            Ok(v.to_string())
        } else {
            Err(self.bad(node, name, v))
        }
    }

    fn var(&self, node: Node<'a, 'a>, name: &str) -> Result<String, ParseError> {
        let v = self.required(node, name)?;
        if is_valid_var(v) {
            Ok(v.to_string())
        } else {
            Err(self.bad(node, name, v))
        }
    }

    fn bool_attr(&self, node: Node<'a, 'a>, name: &str, default: bool) -> Result<bool, ParseError> {
        match node.attribute(name) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(self.bad(node, name, v)),
        }
    }

    fn bad(&self, node: Node, name: &str, value: &str) -> ParseError {
        self.err(
            node,
            ParseErrorCode::BadAttrValue,
            format!("bad value `{}` for `{}` on <{}>", value, name, node.tag_name().name()),
        )
    }

    /// Element children, rejecting stray text and foreign namespaces.
    fn children(&self, node: Node<'a, 'a>) -> Result<Vec<Node<'a, 'a>>, ParseError> {
        let mut out = Vec::new();
        for child in node.children() {
            match child.node_type() {
                NodeType::Element => {
                    if child.tag_name().namespace().is_some() {
                        return Err(self.err(child, ParseErrorCode::UnknownElement, "namespaced element"));
                    }
                    out.push(child);
                }
                NodeType::Text if !child.text().unwrap_or("").trim().is_empty() => {
                    return Err(self.err(
                        child,
                        ParseErrorCode::UnknownElement,
                        format!("unexpected text inside <{}>", node.tag_name().name()),
                    ));
                }
                _ => {}
            }
        }
        Ok(out)
    }

    fn unknown(&self, node: Node, parent: &str) -> ParseError {
        self.err(
            node,
            ParseErrorCode::UnknownElement,
            format!("<{}> is not allowed inside {}", node.tag_name().name(), parent),
        )
    }

    fn expect_leaf(&self, node: Node<'a, 'a>) -> Result<(), ParseError> {
        match self.children(node)?.first() {
            Some(child) => Err(self.unknown(*child, &format!("<{}>", node.tag_name().name()))),
            None => Ok(()),
        }
    }
}

/// Parse one repository document.
pub fn parse(text: &str) -> Result<RepositoryDoc, ParseError> {
    let opts = ParsingOptions {
        allow_dtd: false,
        ..ParsingOptions::default()
    };
    let doc = Document::parse_with_options(text, opts).map_err(|e| {
        let pos = e.pos();
        ParseError {
            line: pos.row,
            column: pos.col,
            code: ParseErrorCode::XmlSyntax,
            message: e.to_string(),
        }
    })?;
    let ctx = Ctx { doc: &doc };
    let root = doc.root_element();
    if root.tag_name().name() != "uim" || root.tag_name().namespace().is_some() {
        return Err(ctx.err(root, ParseErrorCode::UnknownElement, "document element must be <uim>"));
    }
    ctx.check_attrs(root, &["root"])?;
    let root_menu = ctx.id(root, "root")?;

    let mut screens = Vec::new();
    let mut flows = Vec::new();
    for child in ctx.children(root)? {
        match child.tag_name().name() {
            "screen" => screens.push(parse_screen(&ctx, child)?),
            "flow" => flows.push(parse_flow(&ctx, child)?),
            _ => return Err(ctx.unknown(child, "<uim>")),
        }
    }
    Ok(RepositoryDoc::new(root_menu, screens, flows))
}

fn parse_screen<'a>(ctx: &Ctx<'a>, node: Node<'a, 'a>) -> Result<ScreenDef, ParseError> {
    let ty = ctx.required(node, "type")?;
    let allowed: &[&str] = match ty {
        "menu" | "info" | "input" => &["type", "id", "title"],
        "single" | "multi" => &["type", "id", "title", "var"],
        other => return Err(ctx.bad(node, "type", other)),
    };
    ctx.check_attrs(node, allowed)?;
    let id = ctx.id(node, "id")?;
    let title = ctx.required(node, "title")?.to_string();
    let children = ctx.children(node)?;
    let kind = match ty {
        "menu" => {
            let mut items = Vec::new();
            for c in children {
                if c.tag_name().name() != "item" {
                    return Err(ctx.unknown(c, "a menu screen"));
                }
                items.push(parse_item(ctx, c)?);
            }
            ScreenKind::Menu { items }
        }
        "info" => {
            let mut lines = Vec::new();
            for c in children {
                if c.tag_name().name() != "line" {
                    return Err(ctx.unknown(c, "an info screen"));
                }
                ctx.check_attrs(c, &[])?;
                let mut text = String::new();
                for t in c.children() {
                    match t.node_type() {
                        NodeType::Text => text.push_str(t.text().unwrap_or("")),
                        NodeType::Element => return Err(ctx.unknown(t, "<line>")),
                        _ => {}
                    }
                }
                lines.push(text);
            }
            ScreenKind::Info { lines }
        }
        "input" => {
            let mut fields = Vec::new();
            for c in children {
                if c.tag_name().name() != "field" {
                    return Err(ctx.unknown(c, "an input screen"));
                }
                fields.push(parse_field(ctx, c)?);
            }
            ScreenKind::Input { fields }
        }
        _ => {
            let var = ctx.var(node, "var")?;
            let mut options = Vec::new();
            for c in children {
                if c.tag_name().name() != "option" {
                    return Err(ctx.unknown(c, "an option screen"));
                }
                ctx.check_attrs(c, &["label", "value"])?;
                let label = ctx.required(c, "label")?.to_string();
                let value = ctx.required(c, "value")?;
                if !is_valid_value(value) {
                    return Err(ctx.bad(c, "value", value));
                }
                ctx.expect_leaf(c)?;
                options.push(OptionDef {
                    label,
                    value: value.to_string(),
                });
            }
            if ty == "single" {
                ScreenKind::SingleOption { var, options }
            } else {
                ScreenKind::MultiOption { var, options }
            }
        }
    };
    Ok(ScreenDef { id, title, kind })
}

fn parse_item<'a>(ctx: &Ctx<'a>, node: Node<'a, 'a>) -> Result<MenuItem, ParseError> {
    ctx.check_attrs(node, &["label", "flow", "menu"])?;
    let label = ctx.required(node, "label")?.to_string();
    let target = match (node.attribute("flow"), node.attribute("menu")) {
        (Some(_), Some(_)) => {
            return Err(ctx.err(
                node,
                ParseErrorCode::BadAttrValue,
                "<item> takes either `flow` or `menu`, not both",
            ))
        }
        (Some(_), None) => MenuTarget::Leaf(ctx.id(node, "flow")?),
        (None, Some(_)) => MenuTarget::Node(ctx.id(node, "menu")?),
        (None, None) => return Err(ctx.err(node, ParseErrorCode::MissingAttr, "<item> requires `flow` or `menu`")),
    };
    ctx.expect_leaf(node)?;
    Ok(MenuItem { label, target })
}

fn parse_field<'a>(ctx: &Ctx<'a>, node: Node<'a, 'a>) -> Result<FieldDef, ParseError> {
    ctx.check_attrs(node, &["name", "kind", "required", "max", "masked"])?;
    let name = ctx.var(node, "name")?;
    let kind = match node.attribute("kind") {
        None | Some("text") => FieldKind::Text,
        Some("number") => FieldKind::Number,
        Some(v) => return Err(ctx.bad(node, "kind", v)),
    };
    let required = ctx.bool_attr(node, "required", false)?;
    let masked = ctx.bool_attr(node, "masked", false)?;
    let max_len = match node.attribute("max") {
        None => DEFAULT_MAX_LEN,
        Some(v) => match v.parse::<usize>() {
            Ok(n) if (1..=MAX_FIELD_LEN).contains(&n) && !v.starts_with('+') => n,
            _ => return Err(ctx.bad(node, "max", v)),
        },
    };
    ctx.expect_leaf(node)?;
    Ok(FieldDef {
        name,
        kind,
        required,
        max_len,
        masked,
    })
}

fn parse_flow<'a>(ctx: &Ctx<'a>, node: Node<'a, 'a>) -> Result<Flow, ParseError> {
    ctx.check_attrs(node, &["id", "start"])?;
    let id = ctx.id(node, "id")?;
    let start = ctx.id(node, "start")?;
    let mut transitions = Vec::new();
    for c in ctx.children(node)? {
        if c.tag_name().name() != "on" {
            return Err(ctx.unknown(c, "<flow>"));
        }
        ctx.check_attrs(c, &["screen", "outcome", "goto"])?;
        let screen = ctx.id(c, "screen")?;
        let outcome = ctx.required(c, "outcome")?;
        if !is_valid_value(outcome) {
            return Err(ctx.bad(c, "outcome", outcome));
        }
        let goto = ctx.required(c, "goto")?;
        let next = if goto == END {
            Next::End
        } else if is_valid_id(goto) {
            Next::Screen(goto.to_string())
        } else {
            return Err(ctx.bad(c, "goto", goto));
        };
        ctx.expect_leaf(c)?;
        transitions.push(Transition {
            screen,
            outcome: Outcome::parse(outcome),
            next,
        });
    }
    Ok(Flow { id, start, transitions })
}

/// Field length when `max` is omitted.
pub const DEFAULT_MAX_LEN: usize = 32;
/// Upper bound accepted for `max`.
pub const MAX_FIELD_LEN: usize = 255;
