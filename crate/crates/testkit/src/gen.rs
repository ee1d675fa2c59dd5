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

//! Random generators for well-formed inputs.
//!
//! Every generated [`RepositoryDoc`] validates cleanly; the generators panic
//! otherwise, so a failing property always points at the code under test.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use uim_core::flow::{
    validate, FieldDef, FieldKind, Flow, MenuItem, MenuTarget, Next, OptionDef, Outcome, RepositoryDoc, ScreenDef,
    ScreenKind, Transition,
};
use uim_core::repository::tabular::{FieldRow, FlowRow, ItemRow, ScreenRow, TabularSource, TransitionRow};
use uim_core::telnet::{coalesce, Command, TelnetEvent, Verb};

/// Printable ASCII, biased towards characters XML and CSV care about.
pub fn label<R: Rng>(rng: &mut R, max: usize) -> String {
    const SPICY: &[u8] = b"<>&\"'|,$ ";
    let len = rng.gen_range(1..=max.max(1));
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.15) {
                *SPICY.choose(rng).unwrap() as char
            } else {
                rng.gen_range(b'!'..=b'~') as char
            }
        })
        .collect()
}

fn ident<R: Rng>(rng: &mut R, prefix: &str, n: usize) -> String {
    const TAIL: &[u8] = b"abcXYZ019_.-";
    let mut id = format!("{prefix}{n}");
    if rng.gen_bool(0.3) {
        id.push('_');
        for _ in 0..rng.gen_range(1..4) {
            id.push(*TAIL.choose(rng).unwrap() as char);
        }
    }
    id
}

fn var_name<R: Rng>(rng: &mut R) -> String {
    const NAMES: &[&str] = &["sku", "qty", "loc", "lot", "pin", "zone", "_tmp", "Dest2"];
    NAMES.choose(rng).unwrap().to_string()
}

fn info_line<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..5) {
        0 => String::new(),
        1 => format!("{}: ${{{}}}", label(rng, 8), var_name(rng)),
        2 => format!("Cost $${{{}}}", var_name(rng)),
        _ => label(rng, 30),
    }
}

fn options<R: Rng>(rng: &mut R, big: bool) -> Vec<OptionDef> {
    let n = if big {
        rng.gen_range(15..=40)
    } else {
        rng.gen_range(1..=5)
    };
    (0..n)
        .map(|i| OptionDef {
            label: label(rng, 12),
            value: if rng.gen_bool(0.5) {
                format!("v{i}")
            } else {
                format!("{}/{i}.x-y_z", ["A", "b", "C9"].choose(rng).unwrap())
            },
        })
        .collect()
}

fn fields<R: Rng>(rng: &mut R) -> Vec<FieldDef> {
    let mut names: Vec<&str> = vec!["sku", "qty", "loc", "lot", "pin", "x_1"];
    names.shuffle(rng);
    let n = rng.gen_range(1..=3);
    names[..n]
        .iter()
        .map(|name| FieldDef {
            name: name.to_string(),
            kind: if rng.gen_bool(0.5) {
                FieldKind::Text
            } else {
                FieldKind::Number
            },
            required: rng.gen_bool(0.5),
            max_len: rng.gen_range(1..=20),
            masked: rng.gen_bool(0.2),
        })
        .collect()
}

fn flow_screen<R: Rng>(rng: &mut R, id: String) -> ScreenDef {
    let big = rng.gen_bool(0.1);
    let kind = match rng.gen_range(0..4) {
        0 => ScreenKind::Info {
            lines: (0..rng.gen_range(0..=if big { 30 } else { 3 }))
                .map(|_| info_line(rng))
                .collect(),
        },
        1 => ScreenKind::Input { fields: fields(rng) },
        2 => ScreenKind::SingleOption {
            var: var_name(rng),
            options: options(rng, big),
        },
        _ => ScreenKind::MultiOption {
            var: var_name(rng),
            options: options(rng, big),
        },
    };
    ScreenDef {
        id,
        title: label(rng, 24),
        kind,
    }
}

/// A random document that passes validation.
///
/// Menus form a tree under the root; every flow walks a chain of non-menu
/// screens with an `ok` transition on each, plus optional `back`, `cancel`,
/// option-value and looping transitions.
pub fn random_doc<R: Rng>(rng: &mut R) -> RepositoryDoc {
    let menu_ids: Vec<String> = (0..rng.gen_range(1..=5)).map(|i| ident(rng, "m", i)).collect();
    let flow_ids: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| ident(rng, "f", i)).collect();
    let screen_ids: Vec<String> = (0..rng.gen_range(1..=8)).map(|i| ident(rng, "s", i)).collect();

    let mut items: Vec<Vec<MenuItem>> = vec![Vec::new(); menu_ids.len()];
    for (child, id) in menu_ids.iter().enumerate().skip(1) {
        let parent = rng.gen_range(0..child);
        items[parent].push(MenuItem {
            label: label(rng, 16),
            target: MenuTarget::Node(id.clone()),
        });
    }
    for list in items.iter_mut() {
        let leaves = if rng.gen_bool(0.1) {
            rng.gen_range(20..=45)
        } else {
            rng.gen_range(usize::from(list.is_empty())..=3)
        };
        for _ in 0..leaves {
            list.push(MenuItem {
                label: label(rng, 16),
                target: MenuTarget::Leaf(flow_ids.choose(rng).unwrap().clone()),
            });
        }
        list.shuffle(rng);
    }

    let mut screens: Vec<ScreenDef> = menu_ids
        .iter()
        .zip(items)
        .map(|(id, items)| ScreenDef {
            id: id.clone(),
            title: label(rng, 24),
            kind: ScreenKind::Menu { items },
        })
        .collect();
    let flow_screens: Vec<ScreenDef> = screen_ids.iter().map(|id| flow_screen(rng, id.clone())).collect();

    let flows = flow_ids
        .iter()
        .map(|id| {
            let mut chain: Vec<&ScreenDef> = flow_screens.iter().collect();
            chain.shuffle(rng);
            chain.truncate(rng.gen_range(1..=chain.len().min(4)));
            let mut transitions = Vec::new();
            for (k, screen) in chain.iter().enumerate() {
                let ok = if k + 1 < chain.len() {
                    Next::Screen(chain[k + 1].id.clone())
                } else if k > 0 && rng.gen_bool(0.15) {
                    Next::Screen(chain[rng.gen_range(0..k)].id.clone())
                } else {
                    Next::End
                };
                transitions.push(Transition {
                    screen: screen.id.clone(),
                    outcome: Outcome::Ok,
                    next: ok,
                });
                if rng.gen_bool(0.3) {
                    let next = if k > 0 && rng.gen_bool(0.6) {
                        Next::Screen(chain[rng.gen_range(0..k)].id.clone())
                    } else if rng.gen_bool(0.5) {
                        // Forward "back" targets exist in the wild; the shell ignores them.
                        Next::Screen(chain.choose(rng).unwrap().id.clone())
                    } else {
                        Next::End
                    };
                    transitions.push(Transition {
                        screen: screen.id.clone(),
                        outcome: Outcome::Back,
                        next,
                    });
                }
                if rng.gen_bool(0.1) {
                    transitions.push(Transition {
                        screen: screen.id.clone(),
                        outcome: Outcome::Cancel,
                        next: Next::End,
                    });
                }
                if let ScreenKind::SingleOption { options, .. } = &screen.kind {
                    let mut values: Vec<&OptionDef> = options.iter().collect();
                    values.shuffle(rng);
                    for o in values.into_iter().take(rng.gen_range(0..=2)) {
                        let next = if rng.gen_bool(0.5) {
                            Next::End
                        } else {
                            Next::Screen(chain.choose(rng).unwrap().id.clone())
                        };
                        transitions.push(Transition {
                            screen: screen.id.clone(),
                            outcome: Outcome::Value(o.value.clone()),
                            next,
                        });
                    }
                }
            }
            transitions.shuffle(rng);
            Flow {
                id: id.clone(),
                start: chain[0].id.clone(),
                transitions,
            }
        })
        .collect();

    screens.extend(flow_screens);
    screens.shuffle(rng);
    let doc = RepositoryDoc::new(menu_ids[0].clone(), screens, flows);
    let report = validate(&doc);
    assert!(report.is_clean(), "generator produced an invalid document:\n{report}");
    doc
}

/// Tables describing `doc`, written row by row without going through the
/// crate's own conversion. Rows are shuffled and sequence numbers are
/// sparse, so only the documented ordering rules make them line up.
pub fn tables_for<R: Rng>(rng: &mut R, doc: &RepositoryDoc) -> TabularSource {
    let mut t = TabularSource::default();
    for s in doc.screens() {
        let (ty, var) = match &s.kind {
            ScreenKind::Menu { .. } => ("menu", ""),
            ScreenKind::Info { .. } => ("info", ""),
            ScreenKind::Input { .. } => ("input", ""),
            ScreenKind::SingleOption { var, .. } => ("single", var.as_str()),
            ScreenKind::MultiOption { var, .. } => ("multi", var.as_str()),
        };
        t.screens.push(ScreenRow {
            id: s.id.clone(),
            kind: ty.into(),
            title: s.title.clone(),
            var: var.into(),
            root: s.id == doc.root_menu(),
        });
        let mut seq = rng.gen_range(0..5u32);
        let mut next_seq = |rng: &mut R| {
            seq += rng.gen_range(1..10);
            seq
        };
        let mut push = |rng: &mut R, kind: &str, label: &str, target: &str| {
            let seq = next_seq(rng);
            t.items.push(ItemRow {
                screen: s.id.clone(),
                seq,
                kind: kind.into(),
                label: label.into(),
                target: target.into(),
            });
        };
        match &s.kind {
            ScreenKind::Menu { items } => {
                for it in items {
                    match &it.target {
                        MenuTarget::Node(m) => push(rng, "menu", &it.label, m),
                        MenuTarget::Leaf(f) => push(rng, "flow", &it.label, f),
                    }
                }
            }
            ScreenKind::Info { lines } => {
                for l in lines {
                    push(rng, "line", l, "");
                }
            }
            ScreenKind::SingleOption { options, .. } | ScreenKind::MultiOption { options, .. } => {
                for o in options {
                    push(rng, "option", &o.label, &o.value);
                }
            }
            ScreenKind::Input { fields } => {
                for f in fields {
                    let seq = next_seq(rng);
                    t.fields.push(FieldRow {
                        screen: s.id.clone(),
                        seq,
                        name: f.name.clone(),
                        kind: if f.kind == FieldKind::Number { "number" } else { "text" }.into(),
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
                    Next::End => "end".into(),
                    Next::Screen(s) => s.clone(),
                },
            });
        }
    }
    t.screens.shuffle(rng);
    t.items.shuffle(rng);
    t.fields.shuffle(rng);
    t.flows.shuffle(rng);
    t.transitions.shuffle(rng);
    t
}

/// A random well-formed event list: no empty or adjacent `Data` events,
/// with IAC bytes sprinkled into data and subnegotiation payloads.
pub fn random_events<R: Rng>(rng: &mut R, max_len: usize) -> Vec<TelnetEvent> {
    let bytes = |rng: &mut R, n: usize| -> Vec<u8> {
        (0..n)
            .map(|_| if rng.gen_bool(0.1) { 255 } else { rng.gen() })
            .collect()
    };
    let n = rng.gen_range(0..=max_len);
    let events = (0..n).map(|_| match rng.gen_range(0..6) {
        0 | 1 => {
            let len = rng.gen_range(1..=24);
            TelnetEvent::Data(bytes(rng, len))
        }
        2 => TelnetEvent::Command(*Command::ALL.choose(rng).unwrap()),
        3 | 4 => TelnetEvent::Negotiate(*Verb::ALL.choose(rng).unwrap(), rng.gen()),
        _ => {
            let len = rng.gen_range(0..=16);
            TelnetEvent::Subnegotiation(rng.gen(), bytes(rng, len))
        }
    });
    coalesce(events.collect::<Vec<_>>())
}

/// Split `bytes` at random points.
pub fn rechunk<'a, R: Rng>(rng: &mut R, bytes: &'a [u8]) -> Vec<&'a [u8]> {
    let mut cuts: BTreeSet<usize> = (0..rng.gen_range(0..=bytes.len().min(16)))
        .map(|_| rng.gen_range(0..=bytes.len()))
        .collect();
    cuts.insert(0);
    cuts.insert(bytes.len());
    let cuts: Vec<usize> = cuts.into_iter().collect();
    cuts.windows(2).map(|w| &bytes[w[0]..w[1]]).collect()
}

/// A keystroke line an operator (or a cat on the keypad) might send.
pub fn random_line<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..10) {
        0 | 1 => "0".into(),
        2 => String::new(),
        3 => "<".into(),
        4 => ">".into(),
        5 => "00".into(),
        6 => label(rng, 6),
        7 => rng.gen_range(0..1000).to_string(),
        _ => rng.gen_range(1..=12).to_string(),
    }
}
