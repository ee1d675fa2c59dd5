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

use super::Bindings;

/// Expand `${name}` from `bindings` and `$$` to `$`. Unknown names expand to
/// nothing and are returned in the second element. A `$` that starts neither
/// form, or an unterminated `${`, is copied through.
pub fn substitute_checked(template: &str, bindings: &Bindings) -> (String, Vec<String>) {
    let mut out = String::with_capacity(template.len());
    let mut unknown = Vec::new();
    let mut rest = template;
    while let Some(pos) = rest.find('$') {
        out.push_str(&rest[..pos]);
        let after = &rest[pos + 1..];
        if let Some(tail) = after.strip_prefix('$') {
            out.push('$');
            rest = tail;
        } else if let Some(body) = after.strip_prefix('{') {
            match body.find('}') {
                Some(end) => {
                    let name = &body[..end];
                    match bindings.get(name) {
                        Some(v) => out.push_str(v),
                        None => unknown.push(name.to_string()),
                    }
                    rest = &body[end + 1..];
                }
                None => {
                    out.push('$');
                    rest = after;
                }
            }
        } else {
            out.push('$');
            rest = after;
        }
    }
    out.push_str(rest);
    (out, unknown)
}

/// [`substitute_checked`], logging unknown names.
pub fn substitute(template: &str, bindings: &Bindings) -> String {
    let (text, unknown) = substitute_checked(template, bindings);
    for name in unknown {
        tracing::debug!(%name, "template references unbound variable");
    }
    text
}
