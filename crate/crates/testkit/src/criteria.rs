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

//! Whole-property checks shared by the crate tests and the acceptance run.
//!
//! Each check returns a one-line summary on success and a description of
//! the first counterexample on failure.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use uim_core::flow::{parse, validate, ScreenKind};
use uim_core::render::TerminalProfile;
use uim_core::repository::{generate_xml, load_directory, Backend, Repository, Snapshot};
use uim_core::shell::{NavEntry, Session};
use uim_core::telnet::{encode_all, DecodeBuffer, Negotiator, OptionPolicy, TelnetEvent, Verb, SUPPORTED_OPTIONS};

use crate::gen;

pub type CheckResult = Result<String, String>;

/// Serve `doc` as a version-1 snapshot.
pub fn snapshot(doc: uim_core::flow::RepositoryDoc) -> Arc<Snapshot> {
    Repository::with_doc(Backend::XmlDir("<memory>".into()), doc).current()
}

/// decode(encode(es)) = es for `lists` random event lists, both in one
/// piece and re-chunked at random points.
pub fn codec_roundtrip(lists: usize, seed: u64, budget: Duration) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed);
    let started = Instant::now();
    let mut total_bytes = 0;
    for n in 0..lists {
        let events = gen::random_events(&mut rng, 40);
        let wire = encode_all(&events);
        total_bytes += wire.len();

        let mut whole = DecodeBuffer::new();
        let out = whole.decode(&wire);
        if !out.warnings.is_empty() || !whole.is_empty() {
            return Err(format!("list {n}: warnings {:?} on well-formed input", out.warnings));
        }
        if uim_core::telnet::coalesce(out.events) != events {
            return Err(format!("list {n}: decode(encode(es)) != es for {events:?}"));
        }

        let mut chunked = DecodeBuffer::new();
        let mut got = Vec::new();
        for chunk in gen::rechunk(&mut rng, &wire) {
            let out = chunked.decode(chunk);
            if !out.warnings.is_empty() {
                return Err(format!("list {n}: warnings {:?} after re-chunking", out.warnings));
            }
            got.extend(out.events);
        }
        if uim_core::telnet::coalesce(got) != events || !chunked.is_empty() {
            return Err(format!("list {n}: re-chunked decode differs for {events:?}"));
        }
    }
    let elapsed = started.elapsed();
    if elapsed > budget {
        return Err(format!("{lists} lists took {elapsed:.2?}, budget {budget:?}"));
    }
    Ok(format!("{lists} lists, {total_bytes} wire bytes, {elapsed:.2?}"))
}

type Wire = VecDeque<(Verb, u8)>;

#[derive(Clone, PartialEq, Eq, Hash)]
struct SimState {
    a: Negotiator,
    b: Negotiator,
    to_b: Wire,
    to_a: Wire,
    sent: [u8; 4],
}

/// Longest delivery sequence we are willing to call convergent.
const SIM_DEPTH: usize = 64;

fn push_all(wire: &mut Wire, sent: &mut [u8; 4], events: Vec<TelnetEvent>) -> Result<(), String> {
    for e in events {
        match e {
            TelnetEvent::Negotiate(verb, option) => {
                if let Some(i) = SUPPORTED_OPTIONS.iter().position(|&o| o == option) {
                    sent[i] += 1;
                }
                wire.push_back((verb, option));
            }
            other => return Err(format!("negotiator emitted {other:?}")),
        }
    }
    Ok(())
}

/// Explore every delivery interleaving of the two directions. Returns the
/// number of distinct states and the most messages spent on one option.
fn explore(start: SimState, max_per_option: u8) -> Result<(usize, u8), String> {
    let mut seen = HashSet::new();
    let mut stack = vec![(start, 0usize)];
    let mut worst = 0;
    while let Some((state, depth)) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        if depth > SIM_DEPTH {
            return Err(format!("no quiescence after {SIM_DEPTH} deliveries (loop)"));
        }
        worst = worst.max(*state.sent.iter().max().unwrap());
        if let Some((i, &n)) = state.sent.iter().enumerate().find(|(_, &n)| n > max_per_option) {
            return Err(format!("option {} used {n} messages", SUPPORTED_OPTIONS[i]));
        }
        if state.to_a.is_empty() && state.to_b.is_empty() {
            if !state.a.is_settled() || !state.b.is_settled() {
                return Err("quiescent but a side is still waiting for a reply".into());
            }
            for o in SUPPORTED_OPTIONS {
                if state.a.active_locally(o) != state.b.active_remotely(o)
                    || state.a.active_remotely(o) != state.b.active_locally(o)
                {
                    return Err(format!("endpoints disagree about option {o}"));
                }
            }
            continue;
        }
        if let Some(&(verb, option)) = state.to_b.front() {
            let mut next = state.clone();
            next.to_b.pop_front();
            let replies = next.b.receive(verb, option);
            push_all(&mut next.to_a, &mut next.sent, replies)?;
            stack.push((next, depth + 1));
        }
        if let Some(&(verb, option)) = state.to_a.front() {
            let mut next = state.clone();
            next.to_a.pop_front();
            let replies = next.a.receive(verb, option);
            push_all(&mut next.to_b, &mut next.sent, replies)?;
            stack.push((next, depth + 1));
        }
    }
    Ok((seen.len(), worst))
}

fn policy(bits: u8, option: u8) -> OptionPolicy {
    let mut p = OptionPolicy::none();
    if bits & 1 != 0 {
        p = p.allow_local(option);
    }
    if bits & 2 != 0 {
        p = p.allow_remote(option);
    }
    p
}

fn start(a: Negotiator, a_out: Vec<TelnetEvent>, b: Negotiator, b_out: Vec<TelnetEvent>) -> Result<SimState, String> {
    let mut state = SimState {
        a,
        b,
        to_b: Wire::new(),
        to_a: Wire::new(),
        sent: [0; 4],
    };
    push_all(&mut state.to_b, &mut state.sent, a_out)?;
    push_all(&mut state.to_a, &mut state.sent, b_out)?;
    Ok(state)
}

/// Every combination of policy and initial intent (enable our side, enable
/// the peer's side) on both endpoints, for each supported option, under
/// every delivery order. Then the real server handshake against every
/// client policy, all four options at once.
pub fn negotiation_exhaustive() -> CheckResult {
    let mut scenarios = 0;
    let mut states = 0;
    let mut worst = 0;
    for option in SUPPORTED_OPTIONS {
        for combo in 0u16..256 {
            let bits = |shift: u16| ((combo >> shift) & 3) as u8;
            let (a_policy, b_policy, a_intent, b_intent) = (bits(0), bits(2), bits(4), bits(6));
            let mut a = Negotiator::new(policy(a_policy, option));
            let mut b = Negotiator::new(policy(b_policy, option));
            let intents = |n: &mut Negotiator, intent: u8| {
                let mut out = Vec::new();
                if intent & 1 != 0 {
                    out.extend(n.request_local(option, true));
                }
                if intent & 2 != 0 {
                    out.extend(n.request_remote(option, true));
                }
                out
            };
            let a_out = intents(&mut a, a_intent);
            let b_out = intents(&mut b, b_intent);
            let (n, w) = explore(start(a, a_out, b, b_out)?, 4)
                .map_err(|e| format!("option {option}, combo {combo:#010b}: {e}"))?;
            scenarios += 1;
            states += n;
            worst = worst.max(w);
        }
    }
    for client_bits in 0u16..256 {
        let mut client_policy = OptionPolicy::none();
        for (i, &o) in SUPPORTED_OPTIONS.iter().enumerate() {
            if client_bits & (1 << (2 * i)) != 0 {
                client_policy = client_policy.allow_local(o);
            }
            if client_bits & (1 << (2 * i + 1)) != 0 {
                client_policy = client_policy.allow_remote(o);
            }
        }
        for eager in [false, true] {
            let mut server = Negotiator::server();
            let server_out = server.initial_handshake();
            let mut client = Negotiator::new(client_policy);
            let mut client_out = Vec::new();
            if eager {
                // The client opens with everything it would accept.
                for o in SUPPORTED_OPTIONS {
                    if client_policy.accepts_local(o) {
                        client_out.extend(client.request_local(o, true));
                    }
                    if client_policy.accepts_remote(o) {
                        client_out.extend(client.request_remote(o, true));
                    }
                }
            }
            let (n, w) = explore(start(server, server_out, client, client_out)?, 4)
                .map_err(|e| format!("server vs client policy {client_bits:#018b} (eager={eager}): {e}"))?;
            scenarios += 1;
            states += n;
            worst = worst.max(w);
        }
    }
    Ok(format!(
        "{scenarios} scenarios, {states} distinct states, at most {worst} messages per option"
    ))
}

/// Parse error code, or the distinct violation codes of a parsed document.
pub fn diagnose(text: &str) -> Vec<String> {
    match parse(text) {
        Err(e) => vec![e.code.to_string()],
        Ok(doc) => {
            let codes: BTreeSet<String> = validate(&doc).codes().iter().map(|c| c.to_string()).collect();
            codes.into_iter().collect()
        }
    }
}

/// Every fixture listed in `fixtures/expected.txt` yields exactly its
/// expected code, there are at least `min` of them, and `sample` loads
/// without violations.
pub fn schema_corpus(fixtures: &Path, sample: &Path, min: usize) -> CheckResult {
    let manifest = std::fs::read_to_string(fixtures.join("expected.txt")).map_err(|e| format!("expected.txt: {e}"))?;
    let mut checked = 0;
    for line in manifest
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let (file, code) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("bad manifest line `{line}`"))?;
        let text = std::fs::read_to_string(fixtures.join(file)).map_err(|e| format!("{file}: {e}"))?;
        let got = diagnose(&text);
        if got != [code.trim()] {
            return Err(format!("{file}: expected {}, got {got:?}", code.trim()));
        }
        checked += 1;
    }
    if checked < min {
        return Err(format!("only {checked} fixtures, need {min}"));
    }
    let doc = load_directory(sample).map_err(|e| format!("sample: {e}"))?;
    let warnings = validate(&doc).warnings.len();
    Ok(format!(
        "{checked} fixtures matched; sample clean ({warnings} warnings)"
    ))
}

/// parse(generate_xml(t)) equals the model the tables were written from.
pub fn tabular_equivalence(sources: usize, seed: u64) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rows = 0;
    for n in 0..sources {
        let model = gen::random_doc(&mut rng);
        let tables = gen::tables_for(&mut rng, &model);
        rows += tables.screens.len()
            + tables.items.len()
            + tables.fields.len()
            + tables.flows.len()
            + tables.transitions.len();
        let xml = generate_xml(&tables).map_err(|e| format!("source {n}: {e}"))?;
        let parsed = parse(&xml).map_err(|e| format!("source {n}: generated XML does not parse: {e}\n{xml}"))?;
        if parsed != model.canonicalized() {
            return Err(format!("source {n}: model mismatch\n{xml}"));
        }
        let again = gen::tables_for(&mut rng, &model);
        if generate_xml(&again).ok().as_deref() != Some(xml.as_str()) {
            return Err(format!("source {n}: generation depends on row order"));
        }
    }
    Ok(format!("{sources} sources, {rows} rows"))
}

fn random_profile<R: Rng>(rng: &mut R) -> TerminalProfile {
    match rng.gen_range(0..3) {
        0 => TerminalProfile::default(),
        1 => TerminalProfile::rf(),
        _ => {
            TerminalProfile::default()
                .resized(rng.gen_range(10..=100), rng.gen_range(4..=40))
                .0
        }
    }
}

fn check_shape(session: &Session, root: &str) -> Result<(), String> {
    let nav = session.nav();
    if !matches!(nav.first(), Some(NavEntry::Menu { screen, .. }) if screen == root) {
        return Err(format!("stack bottom is not the root menu: {nav:?}"));
    }
    let flows = nav.iter().filter(|e| matches!(e, NavEntry::Flow(_))).count();
    if flows > 1 || (flows == 1 && !session.in_flow()) {
        return Err(format!("flow entry misplaced: {nav:?}"));
    }
    if !session.in_flow() && !session.bindings().is_empty() {
        return Err("bindings survived the end of a flow".into());
    }
    Ok(())
}

/// Press `0` until the root menu is back. Fails when it takes more presses
/// than the stack holds or the session dies.
pub fn back_to_root(session: &mut Session) -> Result<usize, String> {
    let menus = session
        .nav()
        .iter()
        .filter(|e| matches!(e, NavEntry::Menu { .. }))
        .count();
    let bound = menus - 1 + session.flow_depth();
    let mut presses = 0;
    while session.nav().len() > 1 {
        if presses == bound {
            return Err(format!(
                "still at depth {} after {bound} presses of 0",
                session.nav().len()
            ));
        }
        let effect = session.handle_line("0");
        presses += 1;
        if effect.terminated {
            return Err(format!("session terminated by 0 at `{}`", session.current_screen()));
        }
    }
    let effect = session.handle_line("0");
    if effect.terminated || session.nav().len() != 1 {
        return Err("0 at the root menu changed the stack".into());
    }
    Ok(presses)
}

/// Random keystroke lines over random validated documents: no faults,
/// well-shaped stacks, complete records, and `0` always leads home.
pub fn shell_random_walk(docs: usize, lines: usize, seed: u64) -> CheckResult {
    let mut rng = StdRng::seed_from_u64(seed);
    let per_doc = lines.div_ceil(docs.max(1));
    let (mut sent, mut records, mut homecomings) = (0, 0, 0);
    for d in 0..docs {
        let doc = gen::random_doc(&mut rng);
        let root = doc.root_menu().to_string();
        let snap = snapshot(doc);
        let (mut session, _) = Session::open(d as u64, snap.clone(), random_profile(&mut rng));
        let (mut doc_lines, mut i) = (0, 0usize);
        while doc_lines < per_doc && sent < lines {
            i += 1;
            let effect = if rng.gen_bool(0.02) {
                let p = random_profile(&mut rng);
                session.handle_resize(p.width, p.height)
            } else {
                let line = gen::random_line(&mut rng);
                sent += 1;
                doc_lines += 1;
                let screen = session.current_screen().to_string();
                let effect = session.handle_line(&line);
                for r in &effect.records {
                    let names: BTreeSet<&str> = r.bindings.keys().map(String::as_str).collect();
                    let expected: BTreeSet<&str> = match snap.doc.screen(&screen).map(|s| &s.kind) {
                        Some(ScreenKind::Input { fields }) => fields.iter().map(|f| f.name.as_str()).collect(),
                        Some(ScreenKind::SingleOption { var, .. } | ScreenKind::MultiOption { var, .. }) => {
                            BTreeSet::from([var.as_str()])
                        }
                        _ => return Err(format!("doc {d}: record from non-data screen `{screen}`")),
                    };
                    if r.screen != screen || names != expected {
                        return Err(format!("doc {d}: record {r:?} does not match screen `{screen}`"));
                    }
                }
                records += effect.records.len();
                effect
            };
            if effect.terminated {
                return Err(format!("doc {d}: session faulted at `{}`", session.current_screen()));
            }
            let p = session.profile();
            if (effect.frame.width(), effect.frame.height()) != (p.width, p.height) {
                return Err(format!("doc {d}: frame size differs from profile"));
            }
            check_shape(&session, &root).map_err(|e| format!("doc {d}: {e}"))?;
            if i % 97 == 0 {
                back_to_root(&mut session).map_err(|e| format!("doc {d}: {e}"))?;
                homecomings += 1;
            }
        }
        back_to_root(&mut session).map_err(|e| format!("doc {d}: {e}"))?;
        homecomings += 1;
        if session.snapshot_version() != 1 {
            return Err(format!("doc {d}: snapshot version drifted"));
        }
    }
    Ok(format!(
        "{docs} documents, {sent} lines, {records} records, {homecomings} returns to root"
    ))
}
