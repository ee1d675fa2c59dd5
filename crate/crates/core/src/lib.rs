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

//! Core of a Telnet application server for RF handheld terminals: the wire
//! codec and option negotiation, frame rendering, the XML flow model, the
//! repository loaders and the per-session shell.

pub mod flow;
pub mod render;
pub mod repository;
pub mod shell;
pub mod telnet;
