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

//! `uim`: run the server, or check and exercise a repository offline.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;
use uim_core::flow::{self, Bindings};
use uim_core::render::{layout, to_ansi, to_plain, ScreenView, TerminalKind, TerminalProfile};
use uim_core::repository::{Backend, LoadError, Snapshot};
use uim_core::shell::Session;
use uim_server::journal::encode_line;
use uim_server::{Server, ServerConfig, CONFIG_ENV};

#[derive(Debug, Parser)]
#[command(name = "uim", version, about = "Telnet screen-flow server for character terminals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Telnet server and admin API.
    Serve {
        /// Configuration file (flat key = value).
        #[arg(long, env = CONFIG_ENV, default_value = "uim.conf")]
        config: PathBuf,
    },
    /// Check a repository directory; exit status 0 only when it is clean.
    Validate {
        /// XML directory or table directory.
        path: PathBuf,
    },
    /// Print one screen as the server would first draw it.
    Render {
        dir: PathBuf,
        #[arg(long)]
        screen: String,
        #[arg(long, default_value_t = 80)]
        width: u16,
        #[arg(long, default_value_t = 24)]
        height: u16,
        /// VT/ANSI output.
        #[arg(long, conflicts_with = "plain")]
        ansi: bool,
        /// Scrolling-terminal output (the default).
        #[arg(long)]
        plain: bool,
    },
    /// Feed operator lines through a session offline and print the records
    /// it produces, one JSON object per line.
    Simulate {
        dir: PathBuf,
        /// Script file, or the lines themselves with `\n` between them.
        #[arg(long)]
        script: String,
        #[arg(long, default_value_t = 80)]
        width: u16,
        #[arg(long, default_value_t = 24)]
        height: u16,
    },
}

fn init_logging(default: &str) {
    let filter = EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

fn load(dir: &Path) -> anyhow::Result<flow::RepositoryDoc> {
    Backend::detect(dir)
        .load()
        .with_context(|| format!("loading {}", dir.display()))
}

fn validate(path: &Path) -> anyhow::Result<bool> {
    let report = match Backend::detect(path).load() {
        Ok(doc) => flow::validate(&doc),
        Err(LoadError::Invalid { report }) => report,
        Err(e) => {
            println!("error: {e}");
            return Ok(false);
        }
    };
    print!("{report}");
    println!(
        "{}: {} error(s), {} warning(s)",
        path.display(),
        report.violations.len(),
        report.warnings.len()
    );
    Ok(report.is_clean())
}

fn render(dir: &Path, screen: &str, width: u16, height: u16, ansi: bool) -> anyhow::Result<Vec<u8>> {
    let doc = load(dir)?;
    let def = doc.screen(screen).ok_or_else(|| anyhow!("no screen `{screen}`"))?;
    let kind = if ansi { TerminalKind::Ansi } else { TerminalKind::Dumb };
    let profile = TerminalProfile::new(width, height, kind)?;
    let bindings = Bindings::new();
    let frame = layout(&ScreenView::new(def, &bindings), &profile);
    Ok(if ansi { to_ansi(&frame, None) } else { to_plain(&frame) })
}

/// A script argument is a file when one exists at that path; otherwise
/// `\n` escapes separate lines.
fn script_lines(script: &str) -> anyhow::Result<Vec<String>> {
    let text = if Path::new(script).is_file() {
        std::fs::read_to_string(script).with_context(|| format!("reading {script}"))?
    } else {
        script.replace("\\n", "\n")
    };
    let mut lines: Vec<String> = text.split('\n').map(|l| l.trim_end_matches('\r').to_string()).collect();
    if text.ends_with('\n') {
        lines.pop();
    }
    Ok(lines)
}

fn simulate(dir: &Path, script: &str, width: u16, height: u16) -> anyhow::Result<Vec<String>> {
    let doc = load(dir)?;
    let lines = script_lines(script)?;
    let snapshot = Arc::new(Snapshot {
        doc,
        version: 1,
        loaded_at: chrono::Utc::now(),
    });
    let profile = TerminalProfile::new(width, height, TerminalKind::Dumb)?;
    let (mut session, _) = Session::open(1, snapshot, profile);
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let effect = session.handle_line(line);
        out.extend(effect.records.iter().map(encode_line));
        if effect.terminated {
            bail!("session ended at script line {}", i + 1);
        }
    }
    Ok(out)
}

async fn serve(config_path: &Path) -> anyhow::Result<()> {
    let config = ServerConfig::load(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    let server = Server::bind(config).await?;
    server.run(shutdown_signal()).await
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
    tracing::info!("shutdown signal received");
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Serve { config } => {
            init_logging("info");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(&config))?;
            Ok(true)
        }
        Command::Validate { path } => {
            init_logging("error");
            validate(&path)
        }
        Command::Render {
            dir,
            screen,
            width,
            height,
            ansi,
            plain: _,
        } => {
            init_logging("error");
            stdout.write_all(&render(&dir, &screen, width, height, ansi)?)?;
            Ok(true)
        }
        Command::Simulate {
            dir,
            script,
            width,
            height,
        } => {
            init_logging("error");
            for line in simulate(&dir, &script, width, height)? {
                writeln!(stdout, "{line}")?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
