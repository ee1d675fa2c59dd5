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

//! Append-only newline-delimited JSON journal.
//!
//! One writer thread owns the file. Sessions submit batches over a channel
//! and wait for a receipt, so lines from different sessions never
//! interleave and a session only moves on once its records are on disk.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use tokio::sync::oneshot;
use uim_core::shell::DataRecord;

struct Request {
    records: Vec<DataRecord>,
    receipt: oneshot::Sender<io::Result<()>>,
}

/// Handle to the journal writer. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Journal {
    queue: mpsc::Sender<Request>,
    path: PathBuf,
}

/// One journal line, without the trailing newline.
pub fn encode_line(record: &DataRecord) -> String {
    serde_json::to_string(record).expect("records serialize")
}

/// Where journal lines go. Files roll back a failed batch so no partial
/// line is left behind.
trait Sink: Write + Send {
    fn mark(&mut self) -> Option<u64> {
        None
    }
    fn rollback(&mut self, _len: u64) {}
    fn sync(&mut self) -> io::Result<()> {
        Ok(())
    }
}

impl Sink for File {
    fn mark(&mut self) -> Option<u64> {
        self.metadata().map(|m| m.len()).ok()
    }
    fn rollback(&mut self, len: u64) {
        let _ = self.set_len(len);
    }
    fn sync(&mut self) -> io::Result<()> {
        self.sync_data()
    }
}

struct Plain<W>(W);

impl<W: Write + Send> Write for Plain<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.write(buf)
    }
    fn flush(&mut self) -> io::Result<()> {
        self.0.flush()
    }
}

impl<W: Write + Send> Sink for Plain<W> {}

fn write_batch(sink: &mut dyn Sink, records: &[DataRecord], fsync: bool) -> io::Result<()> {
    let mut buf = String::new();
    for r in records {
        buf.push_str(&encode_line(r));
        buf.push('\n');
    }
    let before = sink.mark();
    let mut result = sink.write_all(buf.as_bytes()).and_then(|_| sink.flush());
    if result.is_ok() && fsync {
        result = sink.sync();
    }
    if result.is_err() {
        if let Some(len) = before {
            sink.rollback(len);
        }
    }
    result
}

impl Journal {
    /// Open (creating if needed) and start the writer thread.
    pub fn open(path: &Path, fsync: bool) -> io::Result<Journal> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Journal::start(Box::new(file), path.to_path_buf(), fsync)
    }

    /// Journal into any writer; used to exercise failure handling.
    pub fn with_writer(writer: impl Write + Send + 'static, label: impl Into<PathBuf>) -> io::Result<Journal> {
        Journal::start(Box::new(Plain(writer)), label.into(), false)
    }

    fn start(mut sink: Box<dyn Sink>, path: PathBuf, fsync: bool) -> io::Result<Journal> {
        let (queue, rx) = mpsc::channel::<Request>();
        let shown = path.display().to_string();
        thread::Builder::new().name("uim-journal".into()).spawn(move || {
            for req in rx {
                let result = write_batch(sink.as_mut(), &req.records, fsync);
                if let Err(e) = &result {
                    tracing::error!(journal = %shown, error = %e, records = req.records.len(), "journal write failed");
                }
                let _ = req.receipt.send(result);
            }
        })?;
        Ok(Journal { queue, path })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Append `records` as consecutive lines and wait until they are
    /// written (and synced, if configured). An empty batch is a no-op.
    pub async fn append(&self, records: Vec<DataRecord>) -> io::Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        let (receipt, done) = oneshot::channel();
        self.queue
            .send(Request { records, receipt })
            .map_err(|_| io::Error::other("journal writer stopped"))?;
        done.await.map_err(|_| io::Error::other("journal writer stopped"))?
    }
}
