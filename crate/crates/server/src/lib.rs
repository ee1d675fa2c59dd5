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

//! The UIM application server.
//!
//! A Telnet listener hands each connection to its own task, which owns one
//! [`uim_core::shell::Session`]. Submitted records go through a single
//! journal writer. A small HTTP API lists sessions, mirrors their screens,
//! disconnects them and reloads the repository.

pub mod admin;
pub mod config;
pub mod conn;
pub mod journal;
pub mod line;
pub mod registry;
pub mod server;

pub use config::{ConfigError, ServerConfig, CONFIG_ENV};
pub use server::Server;
