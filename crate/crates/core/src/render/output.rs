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

use std::io::Write;

use super::Frame;

const CLEAR: &[u8] = b"\x1b[2J";
const HOME: &[u8] = b"\x1b[H";

fn goto(out: &mut Vec<u8>, row: u16, col: u16) {
    let _ = write!(out, "\x1b[{};{}H", row + 1, col + 1);
}

/// Serialize for a VT/ANSI terminal.
///
/// Without `previous` the screen is cleared and redrawn. With a same-sized
/// `previous` only changed rows are rewritten; each is padded with spaces far
/// enough to erase what the old row held. Only `ESC[2J`, `ESC[H`,
/// `ESC[r;cH`, CR and LF are used.
pub fn to_ansi(frame: &Frame, previous: Option<&Frame>) -> Vec<u8> {
    let mut out = Vec::new();
    match previous {
        Some(prev) if prev.width() == frame.width() && prev.height() == frame.height() => {
            let mut changed = false;
            for (i, (new, old)) in frame.trimmed_rows().zip(prev.trimmed_rows()).enumerate() {
                if new == old {
                    continue;
                }
                changed = true;
                goto(&mut out, i as u16, 0);
                out.extend_from_slice(new.as_bytes());
                out.extend(std::iter::repeat_n(b' ', old.len().saturating_sub(new.len())));
            }
            if changed || frame.cursor() != prev.cursor() {
                let (r, c) = frame.cursor();
                goto(&mut out, r, c);
            }
        }
        _ => {
            out.extend_from_slice(CLEAR);
            out.extend_from_slice(HOME);
            let last = frame.height() as usize - 1;
            for (i, row) in frame.trimmed_rows().enumerate() {
                out.extend_from_slice(row.as_bytes());
                if i < last {
                    out.extend_from_slice(b"\r\n");
                }
            }
            let (r, c) = frame.cursor();
            goto(&mut out, r, c);
        }
    }
    out
}

/// Serialize for a scrolling terminal: body rows up to the last non-blank
/// one, then the prompt row, each trimmed and CR LF terminated.
pub fn to_plain(frame: &Frame) -> Vec<u8> {
    let rows: Vec<&str> = frame.trimmed_rows().collect();
    let (prompt, body) = rows.split_last().expect("frame has at least one row");
    let body_len = body.iter().rposition(|r| !r.is_empty()).map_or(0, |i| i + 1);
    let mut out = Vec::new();
    for row in &body[..body_len] {
        out.extend_from_slice(row.as_bytes());
        out.extend_from_slice(b"\r\n");
    }
    out.extend_from_slice(prompt.as_bytes());
    out.extend_from_slice(b"\r\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn main_menu() -> Frame {
        let mut f = Frame::blank(80, 24);
        f.set_row(0, "MAIN");
        f.set_row(1, "1 +Receiving");
        f.set_row(2, "2 Inventory");
        f.set_row(3, "3 +Shipping");
        f.set_row(23, "0=Back");
        f.set_cursor(23, 7);
        f
    }

    #[test]
    fn blank_full_redraw() {
        let f = Frame::blank(10, 4);
        assert_eq!(to_ansi(&f, None), b"\x1b[2J\x1b[H\r\n\r\n\r\n\x1b[1;1H".to_vec());
    }

    #[test]
    fn identical_frame_is_empty() {
        let f = main_menu();
        assert!(to_ansi(&f, Some(&f)).is_empty());
        let mut moved = f.clone();
        moved.set_cursor(0, 0);
        assert_eq!(to_ansi(&moved, Some(&f)), b"\x1b[1;1H".to_vec());
    }

    #[test]
    fn single_row_diff() {
        let old = main_menu();
        let mut new = old.clone();
        new.set_row(2, "2 Inv");
        assert_eq!(to_ansi(&new, Some(&old)), b"\x1b[3;1H2 Inv      \x1b[24;8H".to_vec());
    }

    #[test]
    fn size_change_redraws() {
        let old = Frame::blank(20, 16);
        let new = main_menu();
        assert!(to_ansi(&new, Some(&old)).starts_with(b"\x1b[2J\x1b[H"));
    }

    #[test]
    fn plain_menu() {
        assert_eq!(
            to_plain(&main_menu()),
            b"MAIN\r\n1 +Receiving\r\n2 Inventory\r\n3 +Shipping\r\n0=Back\r\n".to_vec()
        );
    }

    #[test]
    fn plain_blank_and_trailing_space() {
        assert_eq!(to_plain(&Frame::blank(10, 4)), b"\r\n".to_vec());
        let mut f = Frame::blank(10, 4);
        f.set_row(1, "ab   ");
        let out = to_plain(&f);
        assert_eq!(out, b"\r\nab\r\n\r\n".to_vec());
        assert!(!out.windows(3).any(|w| w == b" \r\n"));
    }
}
