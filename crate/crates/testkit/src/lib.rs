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

//! Test support shared by the UIM crates: random well-formed inputs, a
//! minimal VT interpreter and a scripted Telnet client.

pub mod client;
pub mod criteria;
pub mod gen;
pub mod vt;

pub use client::{ClientOptions, TelnetClient};
pub use vt::Vt;
