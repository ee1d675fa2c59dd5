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

use proptest::prelude::*;
use rand::Rng;
use uim_core::flow::{Bindings, MenuItem, MenuTarget, ScreenDef, ScreenKind};
use uim_core::render::{layout, paginate, to_ansi, to_plain, Frame, ScreenView, TerminalKind, TerminalProfile};
use uim_testkit::{gen, Vt};

fn seeded(seed: u64) -> rand::rngs::StdRng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn random_frame<R: Rng>(rng: &mut R, w: u16, h: u16) -> Frame {
    let mut f = Frame::blank(w, h);
    for row in 0..h as usize {
        if rng.gen_bool(0.6) {
            f.set_row(row, &gen::label(rng, w as usize + 5));
        }
    }
    f.set_cursor(rng.gen_range(0..h), rng.gen_range(0..w));
    f
}

/// A copy of `f` with a few rows changed.
fn mutate<R: Rng>(rng: &mut R, f: &Frame) -> Frame {
    let mut g = f.clone();
    for _ in 0..rng.gen_range(0..4) {
        let row = rng.gen_range(0..f.height() as usize);
        let text = if rng.gen_bool(0.3) {
            String::new()
        } else {
            gen::label(rng, f.width() as usize)
        };
        g.set_row(row, &text);
    }
    g.set_cursor(rng.gen_range(0..f.height()), rng.gen_range(0..f.width()));
    g
}

fn shows(vt: &Vt, frame: &Frame) -> bool {
    vt.rows() == frame.rows() && vt.cursor() == frame.cursor()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn diff_reproduces_target(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (w, h) = (rng.gen_range(10..=90), rng.gen_range(4..=30));
        let prev = random_frame(&mut rng, w, h);
        let next = if rng.gen_bool(0.5) { mutate(&mut rng, &prev) } else { random_frame(&mut rng, w, h) };
        let mut vt = Vt::new(w, h);
        vt.feed(&to_ansi(&prev, None)).unwrap();
        prop_assert!(shows(&vt, &prev));
        vt.feed(&to_ansi(&next, Some(&prev))).unwrap();
        prop_assert!(shows(&vt, &next));
    }

    #[test]
    fn plain_output_is_clean_ascii(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (w, h) = (rng.gen_range(10..=90), rng.gen_range(4..=30));
        let f = random_frame(&mut rng, w, h);
        let out = to_plain(&f);
        prop_assert!(out.iter().all(|&b| b <= 126 && b != 0x1b));
        prop_assert!(!String::from_utf8(out).unwrap().contains(" \r\n"));
    }

    /// Any screen of any validated document lays out on any legal profile,
    /// page by page, with full-width rows and stable item numbers.
    #[test]
    fn layout_is_total(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let doc = gen::random_doc(&mut rng);
        let (w, h) = (rng.gen_range(10..=100), rng.gen_range(4..=40));
        let profile = TerminalProfile::new(w, h, TerminalKind::Ansi).unwrap();
        let bindings = Bindings::from([("sku".to_string(), "X1".to_string())]);
        for screen in doc.screens() {
            let n = screen.kind.entry_count();
            let geometry = paginate(n, &profile);
            let mut seen = 0;
            for page in 0..geometry.page_count {
                let mut view = ScreenView::new(screen, &bindings);
                view.page = page;
                let frame = layout(&view, &profile);
                prop_assert_eq!(frame.height(), h);
                prop_assert!(frame.rows().iter().all(|r| r.len() == w as usize));
                let (r, c) = frame.cursor();
                prop_assert!(r < h && c < w);
                if matches!(screen.kind, ScreenKind::Menu { .. } | ScreenKind::SingleOption { .. } | ScreenKind::MultiOption { .. }) {
                    for row in 1..=geometry.range(page, n).len() {
                        seen += 1;
                        let number = frame.row(row).split(' ').next().unwrap();
                        // Narrow screens may cut the number itself.
                        prop_assert!(seen.to_string().starts_with(number), "row {row} shows {number}, expected {seen}");
                    }
                }
            }
        }
    }
}

#[test]
fn blank_frame_full_redraw() {
    let f = Frame::blank(10, 4);
    assert_eq!(to_ansi(&f, None), b"\x1b[2J\x1b[H\r\n\r\n\r\n\x1b[1;1H");
    assert_eq!(to_plain(&f), b"\r\n");
}

#[test]
fn unchanged_frame_is_silent() {
    let f = Frame::message(20, 16, "HELLO");
    assert!(to_ansi(&f, Some(&f)).is_empty());
}

#[test]
fn main_menu_plain_transcript() {
    let items = [("Receiving", true), ("Inventory", false), ("Shipping", true)]
        .iter()
        .map(|&(label, node)| MenuItem {
            label: label.into(),
            target: if node {
                MenuTarget::Node("m".into())
            } else {
                MenuTarget::Leaf("f".into())
            },
        })
        .collect();
    let screen = ScreenDef {
        id: "main".into(),
        title: "MAIN".into(),
        kind: ScreenKind::Menu { items },
    };
    let bindings = Bindings::new();
    let frame = layout(&ScreenView::new(&screen, &bindings), &TerminalProfile::default());
    assert_eq!(
        String::from_utf8(to_plain(&frame)).unwrap(),
        "MAIN\r\n1 +Receiving\r\n2 Inventory\r\n3 +Shipping\r\n0=Back\r\n"
    );
}

#[test]
fn resize_between_frames_redraws() {
    let mut rng = seeded(7);
    let small = random_frame(&mut rng, 20, 16);
    let big = random_frame(&mut rng, 80, 24);
    let mut vt = Vt::new(80, 24);
    vt.feed(&to_ansi(&big, Some(&small))).unwrap();
    assert!(shows(&vt, &big));
}
