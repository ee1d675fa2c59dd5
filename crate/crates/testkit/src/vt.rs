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

//! A deliberately small terminal emulator.
//!
//! It understands exactly the subset the server is allowed to emit:
//! `ESC[2J`, `ESC[H`, `ESC[r;cH`, CR, LF, BS and printable ASCII. Anything
//! else is an error, which makes it useful as a compliance check as well as
//! a screen scraper.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VtError {
    pub offset: usize,
    pub reason: String,
}

impl fmt::Display for VtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "byte {}: {}", self.offset, self.reason)
    }
}

impl std::error::Error for VtError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vt {
    width: usize,
    height: usize,
    cells: Vec<Vec<u8>>,
    row: usize,
    col: usize,
    /// Bytes of an escape sequence split across `feed` calls.
    partial: Vec<u8>,
}

impl Vt {
    pub fn new(width: u16, height: u16) -> Vt {
        Vt {
            width: width as usize,
            height: height as usize,
            cells: vec![vec![b' '; width as usize]; height as usize],
            row: 0,
            col: 0,
            partial: Vec::new(),
        }
    }

    pub fn rows(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|r| String::from_utf8(r.clone()).expect("cells hold ASCII"))
            .collect()
    }

    pub fn trimmed_rows(&self) -> Vec<String> {
        self.rows().into_iter().map(|r| r.trim_end().to_string()).collect()
    }

    /// Zero-based cursor, column clamped to the last cell.
    pub fn cursor(&self) -> (u16, u16) {
        (self.row as u16, self.col.min(self.width - 1) as u16)
    }

    /// True when any row contains `needle`.
    pub fn contains(&self, needle: &str) -> bool {
        self.rows().iter().any(|r| r.contains(needle))
    }

    fn line_feed(&mut self) {
        if self.row + 1 == self.height {
            self.cells.remove(0);
            self.cells.push(vec![b' '; self.width]);
        } else {
            self.row += 1;
        }
    }

    fn csi(&mut self, params: &[u8], fin: u8) -> Result<(), String> {
        let text = std::str::from_utf8(params).map_err(|_| "non-ASCII CSI parameters".to_string())?;
        match (fin, text) {
            (b'J', "2") => {
                for r in &mut self.cells {
                    r.fill(b' ');
                }
                Ok(())
            }
            (b'H', "") => {
                self.row = 0;
                self.col = 0;
                Ok(())
            }
            (b'H', _) => {
                let (r, c) = text.split_once(';').ok_or_else(|| format!("bad position `{text}`"))?;
                let r: usize = r.parse().map_err(|_| format!("bad row `{r}`"))?;
                let c: usize = c.parse().map_err(|_| format!("bad column `{c}`"))?;
                if r == 0 || c == 0 || r > self.height || c > self.width {
                    return Err(format!("position {r};{c} outside {}x{}", self.width, self.height));
                }
                self.row = r - 1;
                self.col = c - 1;
                Ok(())
            }
            _ => Err(format!("unsupported sequence ESC[{text}{}", fin as char)),
        }
    }

    /// Apply output bytes.
    pub fn feed(&mut self, bytes: &[u8]) -> Result<(), VtError> {
        let mut input = std::mem::take(&mut self.partial);
        let carried = input.len();
        input.extend_from_slice(bytes);
        let mut i = 0;
        while i < input.len() {
            let b = input[i];
            let err = |reason: String| VtError {
                offset: (i + 1).saturating_sub(carried),
                reason,
            };
            match b {
                0x1b => {
                    let Some(&next) = input.get(i + 1) else {
                        self.partial = input[i..].to_vec();
                        return Ok(());
                    };
                    if next != b'[' {
                        return Err(err(format!("unsupported escape ESC {next:#04x}")));
                    }
                    let start = i + 2;
                    let Some(len) = input[start..].iter().position(|b| !(b.is_ascii_digit() || *b == b';')) else {
                        self.partial = input[i..].to_vec();
                        return Ok(());
                    };
                    let fin = input[start + len];
                    self.csi(&input[start..start + len], fin).map_err(err)?;
                    i = start + len + 1;
                    continue;
                }
                b'\r' => self.col = 0,
                b'\n' => self.line_feed(),
                0x08 => self.col = self.col.saturating_sub(1).min(self.width - 1),
                b' '..=b'~' => {
                    if self.col < self.width {
                        self.cells[self.row][self.col] = b;
                        self.col += 1;
                    }
                }
                other => return Err(err(format!("unexpected byte {other:#04x}"))),
            }
            i += 1;
        }
        Ok(())
    }
}
