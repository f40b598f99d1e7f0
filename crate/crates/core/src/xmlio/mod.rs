// Copyright 2026 The qisxml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! QIS-XML reading and writing.
//!
//! Five namespaces are recognised, each with a conventional prefix used by
//! the writer:
//!
//! | module   | namespace          | prefix |
//! |----------|--------------------|--------|
//! | instance | `qis:instance:1_0` | `i`    |
//! | gate     | `qis:gate:1_0`     | `g`    |
//! | circuit  | `qis:circuit:1_0`  | `c`    |
//! | program  | `qis:program:1_0`  | `p`    |
//! | reusable | `qis:reusable:1_0` | `r`    |

mod parse;
mod write;

pub use parse::parse_instance;
pub use write::serialize_instance;
pub(crate) use write::XmlWriter;

use std::fmt;
use thiserror::Error;

pub const NS_INSTANCE: &str = "qis:instance:1_0";
pub const NS_GATE: &str = "qis:gate:1_0";
pub const NS_CIRCUIT: &str = "qis:circuit:1_0";
pub const NS_PROGRAM: &str = "qis:program:1_0";
pub const NS_REUSABLE: &str = "qis:reusable:1_0";

pub const NAMESPACES: [(&str, &str); 5] = [
    ("i", NS_INSTANCE),
    ("g", NS_GATE),
    ("c", NS_CIRCUIT),
    ("p", NS_PROGRAM),
    ("r", NS_REUSABLE),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    /// Element path such as `/QIS/GateLibrary[1]/Gate[2]`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.path, self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XmlError {
    #[error("document is not well-formed at {line}:{col}: {message}")]
    NotWellFormed { line: u32, col: u32, message: String },
    #[error("root element is not in the instance namespace `{NS_INSTANCE}` (found `{found}`)")]
    WrongRootNamespace { found: String },
}

pub fn has_errors(diags: &[ParseDiagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
