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

//! Admin HTTP API against a live server.

mod common;

use std::time::{Duration, Instant};

use common::*;
use serde_json::{json, Value};
use uim_core::shell::GOODBYE;

async fn get(url: &str) -> (u16, Value) {
    let r = reqwest::get(url).await.unwrap();
    (r.status().as_u16(), r.json().await.unwrap())
}

async fn post(url: &str) -> (u16, Value) {
    let r = reqwest::Client::new().post(url).send().await.unwrap();
    (r.status().as_u16(), r.json().await.unwrap())
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn sessions_list_live_connections() {
    let server = start(|_| {}).await;
    assert_eq!(get(&server.url("/api/sessions")).await, (200, json!([])));
    let c = server.client().await;
    let (status, body) = get(&server.url("/api/sessions")).await;
    assert_eq!(status, 200);
    let list = body.as_array().unwrap();
    assert_eq!(list.len(), 1);
    let s = list[0].as_object().unwrap();
    let mut keys: Vec<_> = s.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "connected_at",
            "last_activity",
            "remote",
            "screen",
            "session_id",
            "terminal",
            "version"
        ]
    );
    assert_eq!(s["screen"], "main");
    assert_eq!(s["version"], 1);
    assert_eq!(s["terminal"], "vt100");
    assert!(s["remote"].as_str().unwrap().starts_with("127.0.0.1:"));
    c.abort().await;
    server.stop().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn repository_and_reload() {
    let server = start(|_| {}).await;
    let (status, info) = get(&server.url("/api/repository")).await;
    assert_eq!(status, 200);
    assert_eq!(info["version"], 1);
    let screens: Vec<_> = info["screens"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(screens.contains(&"main") && screens.contains(&"count"));
    assert!(info["flows"].as_array().unwrap().contains(&json!("inv")));

    let mut c = server.client().await;
    assert_eq!(post(&server.url("/api/reload")).await, (200, json!({"version": 2})));
    // The session picks the new snapshot up with its next line.
    c.line("", WAIT).await.unwrap();
    let (_, list) = get(&server.url("/api/sessions")).await;
    assert_eq!(list[0]["version"], 2);

    let repo = server.config.repository.path().to_path_buf();
    std::fs::write(
        repo.join("zz-broken.xml"),
        "<uim root=\"main\">\n  <screen id=\"x\"\n</uim>\n",
    )
    .unwrap();
    let (status, err) = post(&server.url("/api/reload")).await;
    assert_eq!(status, 409);
    assert_eq!(err["code"], "XmlSyntax");
    assert!(err["file"].as_str().unwrap().ends_with("zz-broken.xml"), "{err}");
    assert!(err["line"].as_u64().unwrap() >= 2, "{err}");
    assert!(err["message"].as_str().is_some());
    assert_eq!(get(&server.url("/api/repository")).await.1["version"], 2);

    std::fs::remove_file(repo.join("zz-broken.xml")).unwrap();
    assert_eq!(post(&server.url("/api/reload")).await, (200, json!({"version": 3})));
    server.stop().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn unknown_ids_are_not_found() {
    let server = start(|_| {}).await;
    let (status, body) = post(&server.url("/api/sessions/999/disconnect")).await;
    assert_eq!(status, 404);
    assert_eq!(body["code"], "NotFound");
    assert!(body["message"].as_str().unwrap().contains("999"));
    assert_eq!(get(&server.url("/api/sessions/999/mirror")).await.0, 404);
    assert_eq!(get(&server.url("/api/nothing")).await.0, 404);
    server.stop().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn disconnect_closes_within_two_seconds() {
    let server = start(|_| {}).await;
    let mut c = server.client().await;
    let id = server.shared.registry.list()[0].session_id;
    let started = Instant::now();
    let (status, _) = post(&server.url(&format!("/api/sessions/{id}/disconnect"))).await;
    assert_eq!(status, 200);
    assert!(c.expect_close(Duration::from_secs(2)).await.unwrap());
    assert_eq!(c.vt().trimmed_rows()[0], GOODBYE);
    while !server.shared.registry.is_empty() {
        assert!(started.elapsed() < Duration::from_secs(2), "session still listed");
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    server.stop().await;
}

/// Every frame the operator sees arrives on the mirror, in order, with the
/// same rows and cursor.
#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn mirror_follows_the_count_flow() {
    let server = start(|_| {}).await;
    let mut c = server.client().await;
    let id = server.shared.registry.list()[0].session_id;
    let mut mirror = EventStream::open(&server.url(&format!("/api/sessions/{id}/mirror"))).await;

    let check = |c: &uim_testkit::TelnetClient, event: &(String, Value)| {
        assert_eq!(event.0, "frame");
        assert_eq!(event_rows(&event.1), c.vt().trimmed_rows());
        let (r, col) = c.vt().cursor();
        assert_eq!(event.1["cursor"], json!([r, col]));
        assert_eq!(
            (event.1["width"].as_u64(), event.1["height"].as_u64()),
            (Some(80), Some(24))
        );
    };
    let first = mirror.next(WAIT).await.expect("current frame");
    check(&c, &first);
    for line in ["1", "SKU123", "", "12"] {
        assert!(c.line(line, WAIT).await.unwrap());
        let event = mirror.next(WAIT).await.expect("frame event");
        check(&c, &event);
    }
    assert!(c.vt().contains("MAIN"));
    assert!(
        mirror.next(Duration::from_millis(200)).await.is_none(),
        "one event per frame"
    );

    c.abort().await;
    // Session gone: the stream ends.
    let deadline = tokio::time::Instant::now() + WAIT;
    while let Some(extra) = mirror.next(WAIT).await {
        assert!(tokio::time::Instant::now() < deadline, "stream did not end: {extra:?}");
    }
    server.stop().await;
}
