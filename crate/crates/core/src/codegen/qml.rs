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

use super::{lower, Block, CodegenError, QML_BANNER};
use crate::model::Program;
use crate::resolver::ResolutionContext;
use crate::xmlio::XmlWriter;

fn gate_type(id: &str) -> Option<&'static str> {
    Some(match id {
        "X" => "PAULI_X",
        "H" => "HADAMARD",
        "C-NOT" => "CNOT",
        "TOFFOLI" => "TOFFOLI",
        "Z" => "PAULI_Z",
        _ => return None,
    })
}

fn application(w: &mut XmlWriter, bits: &[usize], kind: &str) {
    let bits: Vec<String> = bits.iter().map(usize::to_string).collect();
    w.open(
        "Application",
        &[("Name", "G".into()), ("Id", "0".into()), ("Bits", bits.join(","))],
    );
    w.empty("Gate", &[("Type", kind.into())]);
    w.close("Application");
}

/// QML document for `p`: step 0 is empty, step 1 sets the prepared bits
/// and every later step holds one gate application.
///
/// Only the first Execute may carry a Prepare; Measure elements have no
/// QML counterpart and are skipped.
pub fn emit_qml(p: &Program, ctx: &ResolutionContext) -> Result<String, CodegenError> {
    let lowered = lower(p, ctx)?;
    let mut flips = Vec::new();
    let mut apps = Vec::new();
    let mut executes = 0;
    for b in &lowered.blocks {
        if let Block::Execute(e) = b {
            if executes > 0 && !e.prepare.is_empty() {
                return Err(CodegenError::UnsupportedPrepare("prepare after the first Execute".into()));
            }
            executes += 1;
            flips.extend(e.prepare.iter().filter(|(_, bit)| *bit == 1).map(|(pos, _)| e.register[*pos]));
            for a in &e.apps {
                let kind = gate_type(&a.gate).ok_or_else(|| CodegenError::UnsupportedGate(a.gate.clone()))?;
                apps.push((kind, a.bits.clone()));
            }
        }
    }
    flips.extend(lowered.ancillas.iter().filter(|(_, bit)| *bit == 1).map(|(q, _)| *q));

    let mut w = XmlWriter::new();
    w.raw("<!-- ===== -->");
    w.raw(&format!("<!-- {QML_BANNER} -->"));
    w.raw("<!-- ===== -->");
    w.open("QML", &[]);
    w.open(
        "Circuit",
        &[
            ("Name", "default".into()),
            ("Size", (lowered.memory + lowered.ancillas.len()).to_string()),
            ("Id", "default.qml".into()),
            ("Description", String::new()),
        ],
    );
    w.empty("Operation", &[("Step", "0".into())]);
    if executes > 0 {
        if flips.is_empty() {
            w.empty("Operation", &[("Step", "1".into())]);
        } else {
            w.open("Operation", &[("Step", "1".into())]);
            for q in flips {
                application(&mut w, &[q], "PAULI_X");
            }
            w.close("Operation");
        }
    }
    for (k, (kind, bits)) in apps.iter().enumerate() {
        w.open("Operation", &[("Step", (k + 2).to_string())]);
        application(&mut w, bits, kind);
        w.close("Operation");
    }
    w.close("Circuit");
    w.close("QML");
    Ok(w.finish())
}
