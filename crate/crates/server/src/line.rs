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

//! Folding application bytes into operator lines.
//!
//! `CR LF`, `CR NUL`, bare `CR` and bare `LF` all end a line. Backspace
//! (`0x08`) and DEL (`0x7F`) erase one character. Other control bytes and
//! anything outside printable ASCII are dropped.

/// Longest line kept; further characters are ignored until Enter.
pub const MAX_LINE: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edit {
    /// A character was appended to the buffer.
    Insert(u8),
    /// The last character was removed.
    Erase,
    /// Enter: the finished line.
    Line(String),
}

#[derive(Debug, Clone, Default)]
pub struct LineEditor {
    buf: String,
    /// Last byte was CR; a following LF or NUL belongs to it.
    after_cr: bool,
}

impl LineEditor {
    pub fn new() -> LineEditor {
        LineEditor::default()
    }

    /// Characters typed since the last Enter.
    pub fn pending(&self) -> &str {
        &self.buf
    }

    pub fn feed(&mut self, bytes: &[u8]) -> Vec<Edit> {
        let mut edits = Vec::new();
        for &b in bytes {
            if std::mem::take(&mut self.after_cr) && (b == b'\n' || b == 0) {
                continue;
            }
            match b {
                b'\r' | b'\n' => {
                    self.after_cr = b == b'\r';
                    edits.push(Edit::Line(std::mem::take(&mut self.buf)));
                }
                0x08 | 0x7f => {
                    if self.buf.pop().is_some() {
                        edits.push(Edit::Erase);
                    }
                }
                b' '..=b'~' if self.buf.len() < MAX_LINE => {
                    self.buf.push(b as char);
                    edits.push(Edit::Insert(b));
                }
                _ => {}
            }
        }
        edits
    }

    /// Erase-line command: drop the whole buffer, one `Erase` per char.
    pub fn clear(&mut self) -> Vec<Edit> {
        let n = self.buf.len();
        self.buf.clear();
        vec![Edit::Erase; n]
    }
}
