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

//! Character-grid frames and their serialization to terminals.

mod layout;
mod output;

use serde::Serialize;
use thiserror::Error;

pub use layout::{layout, paginate, PageGeometry, ScreenView};
pub use output::{to_ansi, to_plain};

pub const MIN_WIDTH: u16 = 10;
pub const MIN_HEIGHT: u16 = 4;
/// NAWS reports beyond these are clamped.
pub const MAX_WIDTH: u16 = 512;
pub const MAX_HEIGHT: u16 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalKind {
    /// VT/ANSI cursor addressing.
    Ansi,
    /// Scrolling teletype; frames are printed line by line.
    Dumb,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("terminal {width}x{height} is outside {MIN_WIDTH}x{MIN_HEIGHT}..={MAX_WIDTH}x{MAX_HEIGHT}")]
pub struct BadProfileSize {
    pub width: u16,
    pub height: u16,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TerminalProfile {
    pub width: u16,
    pub height: u16,
    pub kind: TerminalKind,
    /// TERMINAL-TYPE name when the peer reported one.
    pub name: String,
}

impl Default for TerminalProfile {
    fn default() -> Self {
        TerminalProfile {
            width: 80,
            height: 24,
            kind: TerminalKind::Ansi,
            name: String::new(),
        }
    }
}

impl TerminalProfile {
    pub fn new(width: u16, height: u16, kind: TerminalKind) -> Result<TerminalProfile, BadProfileSize> {
        if width < MIN_WIDTH || height < MIN_HEIGHT || width > MAX_WIDTH || height > MAX_HEIGHT {
            return Err(BadProfileSize { width, height });
        }
        Ok(TerminalProfile {
            width,
            height,
            kind,
            name: String::new(),
        })
    }

    /// Handheld-sized profile.
    pub fn rf() -> TerminalProfile {
        TerminalProfile {
            width: 20,
            height: 16,
            ..TerminalProfile::default()
        }
    }

    pub fn with_kind(mut self, kind: TerminalKind) -> TerminalProfile {
        self.kind = kind;
        self
    }

    /// Copy with dimensions forced into the supported range. The flag is set
    /// when clamping changed anything.
    pub fn resized(&self, width: u16, height: u16) -> (TerminalProfile, bool) {
        let w = width.clamp(MIN_WIDTH, MAX_WIDTH);
        let h = height.clamp(MIN_HEIGHT, MAX_HEIGHT);
        let profile = TerminalProfile {
            width: w,
            height: h,
            ..self.clone()
        };
        (profile, w != width || h != height)
    }
}

/// A `height` x `width` grid of printable ASCII with a cursor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Frame {
    rows: Vec<String>,
    cursor: (u16, u16),
    masked_cursor_field: bool,
}

/// Replace anything outside printable ASCII with `?`.
pub fn sanitize(text: &str) -> String {
    text.chars()
        .map(|c| if (' '..='~').contains(&c) { c } else { '?' })
        .collect()
}

impl Frame {
    pub fn blank(width: u16, height: u16) -> Frame {
        Frame {
            rows: vec![" ".repeat(width as usize); height as usize],
            cursor: (0, 0),
            masked_cursor_field: false,
        }
    }

    pub fn width(&self) -> u16 {
        self.rows.first().map_or(0, |r| r.len() as u16)
    }

    pub fn height(&self) -> u16 {
        self.rows.len() as u16
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn row(&self, index: usize) -> &str {
        &self.rows[index]
    }

    /// Zero-based `(row, col)`.
    pub fn cursor(&self) -> (u16, u16) {
        self.cursor
    }

    /// True when the cursor sits in a masked input field.
    pub fn masked_cursor_field(&self) -> bool {
        self.masked_cursor_field
    }

    /// Replace a row. Text is sanitized, truncated and padded to width.
    /// Returns true when the text had to be truncated.
    pub fn set_row(&mut self, index: usize, text: &str) -> bool {
        let width = self.width() as usize;
        let mut clean = sanitize(text);
        let truncated = clean.len() > width;
        clean.truncate(width);
        while clean.len() < width {
            clean.push(' ');
        }
        self.rows[index] = clean;
        truncated
    }

    /// Write `text` over the grid starting at `(row, col)`, clipped at the
    /// right edge. Used to track what echoed keystrokes did to the display.
    pub fn overlay(&mut self, row: u16, col: u16, text: &str) {
        let Some(line) = self.rows.get_mut(row as usize) else {
            return;
        };
        let width = line.len();
        let col = col as usize;
        if col >= width {
            return;
        }
        let clean = sanitize(text);
        let n = clean.len().min(width - col);
        line.replace_range(col..col + n, &clean[..n]);
    }

    pub fn set_cursor(&mut self, row: u16, col: u16) {
        let row = row.min(self.height().saturating_sub(1));
        let col = col.min(self.width().saturating_sub(1));
        self.cursor = (row, col);
    }

    pub fn set_masked_cursor_field(&mut self, masked: bool) {
        self.masked_cursor_field = masked;
    }

    /// Rows with trailing padding removed.
    pub fn trimmed_rows(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|r| r.trim_end_matches(' '))
    }

    /// Blank frame with `text` as its first row, e.g. the goodbye frame.
    pub fn message(width: u16, height: u16, text: &str) -> Frame {
        let mut frame = Frame::blank(width, height);
        frame.set_row(0, text);
        frame.set_cursor(height.saturating_sub(1), 0);
        frame
    }
}
