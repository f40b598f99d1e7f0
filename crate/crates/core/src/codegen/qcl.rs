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

use super::{lower, Block, CodegenError, Emitted, QCL_BANNER};
use crate::model::Program;
use crate::resolver::ResolutionContext;
use std::fmt::Write as _;

/// Gate call on alias `r`, whose qubits are the application's inputs in order.
fn call(a: &Emitted, r: &str) -> Result<String, CodegenError> {
    let adj = if a.reversed { "!" } else { "" };
    Ok(match a.gate.as_str() {
        "X" => format!("X({r}[0]);"),
        "H" => format!("H({r}[0]);"),
        "Z" => format!("Z({r}[0]);"),
        "S" => format!("{adj}S({r}[0]);"),
        "T" => format!("{adj}T({r}[0]);"),
        "C-NOT" => format!("CNot({r}[1],{r}[0]);"),
        "TOFFOLI" => format!("CNot({r}[2] , {r}[0] & {r}[1]);"),
        "SWAP" => format!("Swap({r}[0],{r}[1]);"),
        other => return Err(CodegenError::UnsupportedGate(other.to_string())),
    })
}

fn qubit(q: usize, memory: usize) -> String {
    if q < memory {
        format!("memory[{q}]")
    } else {
        format!("ancilla[{}]", q - memory)
    }
}

/// QCL source for `p`, indices 0-based.
pub fn emit_qcl(p: &Program, ctx: &ResolutionContext) -> Result<String, CodegenError> {
    let lowered = lower(p, ctx)?;
    let mem = lowered.memory;
    let mut o = String::new();
    let _ = writeln!(o, "// =====\n// {QCL_BANNER}\n// =====");
    o.push_str("int i;\nint value;\n");
    o.push_str("// Allocate program memory\n");
    let _ = writeln!(o, "qureg memory[{mem}];");
    if !lowered.ancillas.is_empty() {
        let _ = writeln!(o, "qureg ancilla[{}];", lowered.ancillas.len());
        for (q, bit) in &lowered.ancillas {
            if *bit == 1 {
                let _ = writeln!(o, "X({});", qubit(*q, mem));
            }
        }
    }
    let mut step = 0;
    let mut measured = false;
    for (k, b) in lowered.blocks.iter().enumerate() {
        match b {
            Block::Execute(e) => {
                let reg = format!("reg_x{}", k + 1);
                let whole = e.register.len() == mem && e.register.iter().enumerate().all(|(i, &q)| i == q);
                if whole {
                    let _ = writeln!(o, "qureg {reg} = memory;");
                } else {
                    let parts: Vec<String> = e.register.iter().map(|&q| qubit(q, mem)).collect();
                    let _ = writeln!(o, "qureg {reg} = {};", parts.join("&"));
                }
                if !e.prepare.is_empty() {
                    o.push_str("// PREPARE\ni = 1;\n");
                    for (pos, bit) in &e.prepare {
                        let _ = writeln!(o, "measure {reg}[{pos}],value;");
                        let _ = writeln!(o, "if value != {bit} {{ X({reg}[{pos}]); }}");
                    }
                }
                let _ = writeln!(o, "\n// CIRCUIT {}", e.circuit);
                // Register positions of every application input.
                let position = |q: usize| e.register.iter().position(|&r| r == q).unwrap();
                for a in &e.apps {
                    step += 1;
                    let alias = format!("reg_s{step}_o1");
                    let parts: Vec<String> = a.bits.iter().map(|&q| format!("{reg}[{}]", position(q))).collect();
                    let _ = writeln!(o, "// STEP {step}\n// OPERATION 1");
                    let _ = writeln!(o, "qureg {alias} = {};", parts.join("&"));
                    let _ = writeln!(o, "{}\n", call(a, &alias)?);
                }
            }
            Block::Measure(qs) => {
                measured = true;
                o.push_str("// MEASURE\n");
                for q in qs {
                    let _ = writeln!(o, "measure memory[{q}],value;\nprint {q},\"=\",value;");
                }
            }
        }
    }
    if !measured {
        o.push_str("// MEASUREMENT\n");
        let _ = writeln!(o, "for i=0 to {}{{", mem.saturating_sub(1));
        o.push_str("    measure memory[i],value;\n    print i,\"=\",value;\n}\n");
    }
    Ok(o)
}
