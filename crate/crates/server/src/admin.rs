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

//! Admin HTTP API.
//!
//! | Method | Path                             | Result                         |
//! |--------|----------------------------------|--------------------------------|
//! | GET    | `/api/sessions`                  | live sessions                  |
//! | GET    | `/api/repository`                | version, screen and flow ids   |
//! | POST   | `/api/reload`                    | new version, or 409 with error |
//! | POST   | `/api/sessions/{id}/disconnect`  | close a session                |
//! | GET    | `/api/sessions/{id}/mirror`      | event stream of `frame`s       |
//!
//! Errors are `{"code": ..., "message": ...}` with a matching status.

use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use serde::Serialize;
use serde_json::json;
use uim_core::repository::LoadError;
use uim_core::shell::SessionId;

use crate::registry::SessionInfo;
use crate::server::Shared;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
}

impl ApiError {
    fn not_found(id: SessionId) -> ApiError {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code: "NotFound".into(),
            message: format!("no session {id}"),
            file: None,
            line: None,
        }
    }

    fn internal(message: String) -> ApiError {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "Internal".into(),
            message,
            file: None,
            line: None,
        }
    }
}

impl From<LoadError> for ApiError {
    fn from(e: LoadError) -> ApiError {
        ApiError {
            status: StatusCode::CONFLICT,
            code: e.code(),
            message: e.to_string(),
            file: e.file().map(|p| p.display().to_string()),
            line: e.line(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepositoryInfo {
    pub version: u64,
    pub screens: Vec<String>,
    pub flows: Vec<String>,
}

pub fn router(shared: Arc<Shared>) -> Router {
    Router::new()
        .route("/api/sessions", get(sessions))
        .route("/api/repository", get(repository))
        .route("/api/reload", post(reload))
        .route("/api/sessions/{id}/disconnect", post(disconnect))
        .route("/api/sessions/{id}/mirror", get(mirror))
        .fallback(|| async {
            ApiError {
                status: StatusCode::NOT_FOUND,
                code: "NotFound".into(),
                message: "no such endpoint".into(),
                file: None,
                line: None,
            }
        })
        .with_state(shared)
}

async fn sessions(State(shared): State<Arc<Shared>>) -> Json<Vec<SessionInfo>> {
    Json(shared.registry.list())
}

async fn repository(State(shared): State<Arc<Shared>>) -> Json<RepositoryInfo> {
    let snapshot = shared.repository.current();
    Json(RepositoryInfo {
        version: snapshot.version,
        screens: snapshot.doc.screens().iter().map(|s| s.id.clone()).collect(),
        flows: snapshot.doc.flows().iter().map(|f| f.id.clone()).collect(),
    })
}

async fn reload(State(shared): State<Arc<Shared>>) -> Result<Json<serde_json::Value>, ApiError> {
    let repo = shared.repository.clone();
    let snapshot = tokio::task::spawn_blocking(move || repo.reload())
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(json!({ "version": snapshot.version })))
}

async fn disconnect(
    State(shared): State<Arc<Shared>>,
    Path(id): Path<SessionId>,
) -> Result<Json<serde_json::Value>, ApiError> {
    if shared.registry.disconnect(id) {
        Ok(Json(json!({ "session_id": id, "disconnecting": true })))
    } else {
        Err(ApiError::not_found(id))
    }
}

async fn mirror(
    State(shared): State<Arc<Shared>>,
    Path(id): Path<SessionId>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let rx = shared.registry.subscribe(id).ok_or_else(|| ApiError::not_found(id))?;
    let events = stream::unfold(rx, |mut rx| async move {
        let frame = rx.recv().await?;
        let event = Event::default()
            .event("frame")
            .json_data(&frame)
            .expect("frames serialize");
        Some((Ok(event), rx))
    });
    Ok(Sse::new(events).keep_alive(KeepAlive::default()))
}
