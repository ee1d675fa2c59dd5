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

use std::path::PathBuf;
use std::sync::Arc;

use uim_core::flow::{parse, Bindings, RepositoryDoc};
use uim_core::render::{to_plain, Frame, TerminalKind, TerminalProfile};
use uim_core::repository::{load_directory, Backend, Repository, Snapshot};
use uim_core::shell::{NavEntry, Session, MSG_AT_TOP, MSG_INVALID, MSG_REQUIRED, MSG_TOO_LONG};
use uim_testkit::criteria;

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sample() -> Arc<Snapshot> {
    criteria::snapshot(load_directory(&workspace().join("sample")).unwrap())
}

fn open() -> Session {
    Session::open(7, sample(), TerminalProfile::default()).0
}

fn rows(frame: &Frame) -> Vec<&str> {
    frame.trimmed_rows().collect()
}

fn prompt(frame: &Frame) -> &str {
    frame.trimmed_rows().last().unwrap()
}

#[test]
fn opens_at_root_menu() {
    let (session, effect) = Session::open(1, sample(), TerminalProfile::default());
    assert_eq!(&rows(&effect.frame)[..3], ["MAIN", "1 Inventory", "2 +Receiving"]);
    assert_eq!(prompt(&effect.frame), "0=Back");
    assert_eq!(
        session.nav(),
        [NavEntry::Menu {
            screen: "main".into(),
            page: 0
        }]
    );
    assert!(!effect.terminated);
}

#[test]
fn dumb_handheld_shows_same_text() {
    let profile = TerminalProfile::rf().with_kind(TerminalKind::Dumb);
    let (_, effect) = Session::open(1, sample(), profile);
    assert_eq!(
        String::from_utf8(to_plain(&effect.frame)).unwrap(),
        "MAIN\r\n1 Inventory\r\n2 +Receiving\r\n0=Back\r\n"
    );
}

#[test]
fn node_and_back() {
    let mut s = open();
    let e = s.handle_line("2");
    assert_eq!(rows(&e.frame)[..2], ["RECEIVING", "1 By PO"]);
    assert_eq!(s.nav().len(), 2);
    let e = s.handle_line("0");
    assert_eq!(rows(&e.frame)[0], "MAIN");
    assert_eq!(s.nav().len(), 1);
}

#[test]
fn zero_at_root_stays_put() {
    let mut s = open();
    let e = s.handle_line("0");
    assert_eq!(rows(&e.frame)[0], "MAIN");
    assert_eq!(prompt(&e.frame), format!("{MSG_AT_TOP} 0=Back"));
    assert_eq!(s.nav().len(), 1);
}

#[test]
fn invalid_selections() {
    let mut s = open();
    for line in ["3", "x", "01", "", " ", "99", "8", "9"] {
        let e = s.handle_line(line);
        assert_eq!(prompt(&e.frame), format!("{MSG_INVALID} 0=Back"), "{line:?}");
        assert_eq!(s.nav().len(), 1);
    }
}

#[test]
fn count_flow_produces_one_record() {
    let mut s = open();
    let e = s.handle_line("1");
    assert_eq!(rows(&e.frame)[..3], ["COUNT", "sku:", "qty:"]);
    assert_eq!(e.frame.cursor(), (1, 5));
    let e = s.handle_line("SKU123");
    assert!(e.records.is_empty());
    assert_eq!(rows(&e.frame)[1], "sku: SKU123");
    assert_eq!(e.frame.cursor(), (2, 5));
    let e = s.handle_line("12");
    assert_eq!(e.records.len(), 1);
    let r = &e.records[0];
    assert_eq!((r.flow.as_str(), r.screen.as_str(), r.session_id), ("inv", "count", 7));
    assert_eq!(
        r.bindings,
        Bindings::from([("sku".into(), "SKU123".into()), ("qty".into(), "12".into())])
    );
    assert_eq!(rows(&e.frame)[0], "MAIN");
    assert_eq!(s.nav().len(), 1);
    assert!(s.bindings().is_empty());
}

#[test]
fn field_validation_reprompts() {
    let mut s = open();
    s.handle_line("1");
    assert_eq!(prompt(&s.handle_line("").frame), format!("{MSG_REQUIRED} 0=Back"));
    assert_eq!(
        prompt(&s.handle_line(&"X".repeat(21)).frame),
        format!("{MSG_TOO_LONG} 0=Back")
    );
    s.handle_line("SKU123");
    let e = s.handle_line("12x");
    assert_eq!(prompt(&e.frame), format!("{MSG_INVALID} 0=Back"));
    assert!(e.records.is_empty());
    assert_eq!(s.current_screen(), "count");
}

#[test]
fn zero_leaves_input_and_double_zero_is_a_zero() {
    let mut s = open();
    s.handle_line("1");
    s.handle_line("SKU123");
    // Back from the second field leaves the screen, and with it the flow.
    let e = s.handle_line("0");
    assert!(e.records.is_empty());
    assert_eq!(rows(&e.frame)[0], "MAIN");

    s.handle_line("1");
    s.handle_line("00");
    let e = s.handle_line("00");
    assert_eq!(e.records[0].bindings["sku"], "0");
    assert_eq!(e.records[0].bindings["qty"], "0");
    assert_eq!(prompt(&e.frame), "0=Back");
}

fn qc_doc() -> RepositoryDoc {
    let text = r#"<uim root="main">
      <screen type="menu" id="main" title="MAIN"><item label="QC" flow="qc"/></screen>
      <screen type="single" id="reason" title="REASON" var="reason">
        <option label="Damaged" value="dmg"/><option label="Missing" value="miss"/>
      </screen>
      <screen type="multi" id="checks" title="CHECKS" var="checks">
        <option label="Label" value="label"/><option label="Seal" value="seal"/><option label="Count" value="count"/>
      </screen>
      <screen type="info" id="done" title="DONE"><line>Reason ${reason}, checks ${checks}</line></screen>
      <flow id="qc" start="reason">
        <on screen="reason" outcome="ok" goto="checks"/>
        <on screen="reason" outcome="miss" goto="done"/>
        <on screen="checks" outcome="ok" goto="done"/>
        <on screen="done" outcome="ok" goto="end"/>
      </flow>
    </uim>"#;
    parse(text).unwrap()
}

#[test]
fn option_screens_and_info_templates() {
    let mut s = Session::open(1, criteria::snapshot(qc_doc()), TerminalProfile::default()).0;
    s.handle_line("1");
    let e = s.handle_line("1");
    assert_eq!(e.records[0].bindings, Bindings::from([("reason".into(), "dmg".into())]));
    assert_eq!(s.current_screen(), "checks");
    s.handle_line("3");
    let e = s.handle_line("1");
    assert_eq!(rows(&e.frame)[1..4], ["1 [X] Label", "2 [ ] Seal", "3 [X] Count"]);
    assert_eq!(prompt(&e.frame), "ENTER=Done 0=Back");
    let e = s.handle_line("");
    assert_eq!(
        e.records[0].bindings,
        Bindings::from([("checks".into(), "label,count".into())])
    );
    assert_eq!(rows(&e.frame)[1], "Reason dmg, checks label,count");
    assert_eq!(prompt(&e.frame), "ENTER=Continue");
    let e = s.handle_line("");
    assert_eq!(rows(&e.frame)[0], "MAIN");
    assert!(s.bindings().is_empty());
}

#[test]
fn option_value_outcome_and_default_back() {
    let mut s = Session::open(1, criteria::snapshot(qc_doc()), TerminalProfile::default()).0;
    s.handle_line("1");
    s.handle_line("2");
    assert_eq!(s.current_screen(), "done");
    // No back transition: pop one step.
    s.handle_line("0");
    assert_eq!(s.current_screen(), "reason");
    s.handle_line("1");
    s.handle_line("2");
    // Back from multi discards the toggles.
    s.handle_line("0");
    s.handle_line("1");
    assert_eq!(s.current_screen(), "checks");
    let e = s.handle_line("");
    assert_eq!(e.records[0].bindings["checks"], "");
    s.handle_line("0");
    s.handle_line("0");
    s.handle_line("0");
    assert_eq!(s.nav().len(), 1);
    assert!(!s.in_flow());
}

fn big_menu(n: usize) -> RepositoryDoc {
    let items: String = (1..=n)
        .map(|i| format!(r#"<item label="Item{i}" flow="f"/>"#))
        .collect();
    parse(&format!(
        r#"<uim root="big"><screen type="menu" id="big" title="BIG">{items}</screen>
        <screen type="info" id="i" title="I"/><flow id="f" start="i"><on screen="i" outcome="ok" goto="end"/></flow></uim>"#
    ))
    .unwrap()
}

#[test]
fn thirty_item_root_paginates() {
    let (mut s, e) = Session::open(1, criteria::snapshot(big_menu(30)), TerminalProfile::rf());
    assert_eq!(rows(&e.frame)[14], "<=Prev >=Next 1/3");
    let e = s.handle_line(">");
    assert_eq!(rows(&e.frame)[1], "14 Item14");
    let e = s.handle_line(">");
    assert_eq!(rows(&e.frame)[14], "<=Prev >=Next 3/3");
    let e = s.handle_line(">");
    assert_eq!(rows(&e.frame)[14], "<=Prev >=Next 3/3");
    // Numbers are global: 14 picks Item14 from any page.
    s.handle_line("<");
    s.handle_line("<");
    s.handle_line("14");
    assert!(s.in_flow());
}

#[test]
fn resize_clamps_page_and_keeps_screen() {
    let (mut s, _) = Session::open(1, criteria::snapshot(big_menu(30)), TerminalProfile::rf());
    s.handle_line(">");
    s.handle_line(">");
    // Three pages of 13 become two pages of 21; page 3 clamps to page 2.
    let e = s.handle_resize(80, 24);
    assert_eq!(
        s.nav(),
        [NavEntry::Menu {
            screen: "big".into(),
            page: 1
        }]
    );
    assert_eq!(rows(&e.frame)[1], "22 Item22");
    assert_eq!(rows(&e.frame)[22], "<=Prev >=Next 2/2");
    let same = s.handle_resize(80, 24);
    assert_eq!(same.frame, e.frame);
    let tiny = s.handle_resize(3, 2);
    assert_eq!((tiny.frame.width(), tiny.frame.height()), (10, 4));
    assert_eq!(s.current_screen(), "big");
}

#[test]
fn snapshot_is_pinned_during_flows() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(workspace().join("sample/uim.xml")).unwrap();
    std::fs::write(dir.path().join("uim.xml"), &text).unwrap();
    let repo = Repository::open(Backend::detect(dir.path())).unwrap();
    let (mut s, _) = Session::open(1, repo.current(), TerminalProfile::default());
    s.handle_line("1");
    std::fs::write(dir.path().join("uim.xml"), text.replace("COUNT", "STOCKTAKE")).unwrap();
    let newer = repo.reload().unwrap();
    assert!(!s.offer_snapshot(newer));
    let e = s.handle_line("SKU1");
    assert_eq!(rows(&e.frame)[0], "COUNT");
    assert_eq!(s.snapshot_version(), 1);
    s.handle_line("1");
    assert_eq!(s.snapshot_version(), 2);
    let e = s.handle_line("1");
    assert_eq!(rows(&e.frame)[0], "STOCKTAKE");
}

#[test]
fn outside_flows_newer_snapshots_apply_at_once() {
    let doc = load_directory(&workspace().join("sample")).unwrap();
    let repo = Repository::with_doc(Backend::XmlDir("x".into()), doc.clone());
    let (mut s, _) = Session::open(1, repo.current(), TerminalProfile::default());
    s.handle_line("2");
    let renamed = RepositoryDoc::new(
        "main",
        doc.screens().iter().filter(|s| s.id != "recv").cloned().collect(),
        doc.flows().to_vec(),
    );
    let snap = Arc::new(Snapshot {
        doc: renamed,
        version: 5,
        loaded_at: chrono::Utc::now(),
    });
    assert!(s.offer_snapshot(snap));
    // `recv` vanished, so the session is sent home.
    assert_eq!(s.nav().len(), 1);
    assert_eq!(s.snapshot_version(), 5);
}

#[test]
fn random_walk_over_random_documents() {
    let summary = criteria::shell_random_walk(200, 100_000, 0xfeed).unwrap();
    println!("{summary}");
}
