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

//! The `uim` binary.

mod common;

use std::net::TcpListener;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use common::*;
use uim_core::shell::GOODBYE;
use uim_testkit::{ClientOptions, TelnetClient};

fn uim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uim"))
        .args(args)
        .env_remove("UIM_CONFIG")
        .output()
        .unwrap()
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

#[test]
fn validate_reports_and_sets_exit_status() {
    let sample = sample_dir();
    let out = uim(&["validate", sample.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 error(s), 4 warning(s)"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(
        workspace_root().join("fixtures/malformed/menu-cycle.xml"),
        dir.path().join("menu-cycle.xml"),
    )
    .unwrap();
    let out = uim(&["validate", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("MenuCycle"));

    let out = uim(&["validate", "/definitely/not/here"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn render_matches_every_golden_file() {
    let golden = sample_dir().join("golden");
    let mut checked = 0;
    for screen in ["main", "done", "count", "reason", "checks"] {
        for (w, h) in [(80, 24), (20, 16)] {
            for mode in ["plain", "ansi"] {
                let out = uim(&[
                    "render",
                    sample_dir().to_str().unwrap(),
                    "--screen",
                    screen,
                    "--width",
                    &w.to_string(),
                    "--height",
                    &h.to_string(),
                    &format!("--{mode}"),
                ]);
                assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
                let want = std::fs::read(golden.join(format!("{screen}-{w}x{h}.{mode}"))).unwrap();
                assert_eq!(
                    String::from_utf8_lossy(&out.stdout),
                    String::from_utf8_lossy(&want),
                    "{screen} {w}x{h} {mode}"
                );
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 20);
}

#[test]
fn simulate_prints_records() {
    let sample = sample_dir();
    let out = uim(&["simulate", sample.to_str().unwrap(), "--script", "1\\nSKU123\\n12\\n"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 1, "{text}");
    let record: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(record["bindings"], serde_json::json!({"sku": "SKU123", "qty": "12"}));

    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("script.txt");
    std::fs::write(&script, "1\r\nA\r\n1\r\n0\r\n2\r\n1\r\nB\r\n00\r\n").unwrap();
    let out = uim(&[
        "simulate",
        sample.to_str().unwrap(),
        "--script",
        script.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let qty: Vec<_> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["bindings"]["qty"].clone())
        .collect();
    assert_eq!(qty, ["1", "0"]);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["render", "--nope"][..],
        &["frobnicate"],
        &[],
        &["render", "sample", "--ansi", "--plain", "--screen", "main"],
    ] {
        let out = uim(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = uim(&["render", sample_dir().to_str().unwrap(), "--screen", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no screen `nope`"));
}

#[test]
fn serve_refuses_a_broken_repository() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.xml"), "<uim root=\"m\">").unwrap();
    let conf = dir.path().join("uim.conf");
    std::fs::write(
        &conf,
        format!(
            "repository = .\njournal_path = j.ndjson\ntelnet_port = {}\nadmin_port = {}\n",
            free_port(),
            free_port()
        ),
    )
    .unwrap();
    let out = uim(&["serve", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.xml"));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn serve_from_env_config_and_stop_on_sigterm() {
    let dir = tempfile::tempdir().unwrap();
    copy_sample(&dir.path().join("repo"));
    let port = free_port();
    let conf = dir.path().join("site.conf");
    std::fs::write(
        &conf,
        format!("telnet_bind = 127.0.0.1\ntelnet_port = {port}\nadmin_port = {}\nrepository = repo\njournal_path = j.ndjson\n", free_port()),
    )
    .unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_uim"))
        .arg("serve")
        .env("UIM_CONFIG", &conf)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();

    let started = Instant::now();
    let mut client = loop {
        match TelnetClient::connect(("127.0.0.1", port), ClientOptions::default()).await {
            Ok(c) => break c,
            Err(_) if started.elapsed() < WAIT => tokio::time::sleep(Duration::from_millis(20)).await,
            Err(e) => panic!("server did not come up: {e}"),
        }
    };
    assert!(client.expect_frame(WAIT).await.unwrap());
    count_flow(&mut client, "SKU123", "12").await;
    assert_eq!(read_journal(&dir.path().join("j.ndjson")).len(), 1);

    let killed = Command::new("kill")
        .arg("-TERM")
        .arg(child.id().to_string())
        .status()
        .unwrap();
    assert!(killed.success());
    assert!(client.expect_close(WAIT).await.unwrap());
    assert_eq!(client.vt().trimmed_rows()[0], GOODBYE);
    let status = tokio::task::spawn_blocking(move || child.wait())
        .await
        .unwrap()
        .unwrap();
    assert!(status.success(), "{status:?}");
}
