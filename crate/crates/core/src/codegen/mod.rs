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

//! Source emitters for external simulators.
//!
//! Both backends work from the same lowering: every Execute is flattened
//! and its applications are rewritten onto absolute memory qubits.
//! Netlist ancillas are appended after the memory.

mod qcl;
mod qml;

pub use qcl::emit_qcl;
pub use qml::emit_qml;

use crate::expr::EvalContext;
use crate::model::*;
use crate::resolver::{ResolutionContext, ResolveError};
use crate::rewrite::{flatten, RewriteError};
use crate::sim::{resolve_register, RegisterError};
use thiserror::Error;

pub const QML_BANNER: &str = "QIS-XML QML Compiler v2007.04";
pub const QCL_BANNER: &str = "QIS-XML QCL Compiler v2007.04";

#[derive(Debug, Error)]
pub enum CodegenError {
    #[error("gate `{0}` has no equivalent in the target dialect")]
    UnsupportedGate(String),
    #[error("unsupported prepare: {0}")]
    UnsupportedPrepare(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Register(#[from] RegisterError),
    #[error("register of {register} qubit(s) cannot execute a {circuit}-qubit circuit")]
    SizeMismatch { register: usize, circuit: usize },
    #[error("nested programs are not supported")]
    Subprogram,
}

/// One gate application on absolute 0-based qubits.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Emitted {
    pub gate: String,
    pub reversed: bool,
    pub bits: Vec<usize>,
}

pub(crate) struct ExecuteBlock {
    pub circuit: String,
    /// 0-based memory (or ancilla) qubits of the register, then the
    /// netlist's own ancillas.
    pub register: Vec<usize>,
    /// `(register position, bit)` prepares, 0-based positions.
    pub prepare: Vec<(usize, u8)>,
    pub apps: Vec<Emitted>,
}

pub(crate) enum Block {
    Execute(ExecuteBlock),
    /// 0-based memory qubits.
    Measure(Vec<usize>),
}

pub(crate) struct Lowered {
    pub memory: usize,
    /// `(0-based qubit, bit)` of every ancilla, numbered after memory.
    pub ancillas: Vec<(usize, u8)>,
    pub blocks: Vec<Block>,
}

fn prepare_bit(v: &ComplexValue) -> Result<u8, CodegenError> {
    let mut w = Vec::new();
    let a = v
        .evaluate::<f64>(&EvalContext::new(), &mut w)
        .map_err(|e| CodegenError::UnsupportedPrepare(e.to_string()))?;
    if a.im == 0.0 && (a.re == 0.0 || a.re == 1.0) {
        Ok(a.re as u8)
    } else {
        Err(CodegenError::UnsupportedPrepare(format!(
            "value {}{:+}i is not a classical bit",
            a.re, a.im
        )))
    }
}

pub(crate) fn lower(p: &Program, ctx: &ResolutionContext) -> Result<Lowered, CodegenError> {
    if !p.memory_init.is_empty() {
        return Err(CodegenError::UnsupportedPrepare("memory qubit initialisation".into()));
    }
    let mut out = Lowered {
        memory: p.memory_size,
        ancillas: Vec::new(),
        blocks: Vec::new(),
    };
    for step in &p.steps {
        match step {
            ProgramStep::Execute { register, body } => {
                let indices = resolve_register(register, p.memory_size, &p.global_registers)?;
                let circuit: &Circuit = match body {
                    ExecuteBody::Inline(c) => c,
                    ExecuteBody::Reference(r) => ctx.resolve_circuit(r)?,
                    ExecuteBody::Subprogram(_) => return Err(CodegenError::Subprogram),
                };
                if circuit.size != register.size {
                    return Err(CodegenError::SizeMismatch {
                        register: register.size,
                        circuit: circuit.size,
                    });
                }
                let mut prepare = Vec::new();
                for set in &register.prepare {
                    let bit = prepare_bit(&set.value)?;
                    for sel in &set.targets {
                        match sel {
                            QubitSelector::Index(i) => prepare.push((i.wrapping_sub(1), bit)),
                            QubitSelector::Range { start, end } => prepare.extend((*start..=*end).map(|i| (i.wrapping_sub(1), bit))),
                            QubitSelector::Register(r) => {
                                return Err(CodegenError::UnsupportedPrepare(format!("register reference {}", r.id)))
                            }
                        }
                    }
                }
                if let Some(&(i, _)) = prepare.iter().find(|(i, _)| *i >= indices.len()) {
                    return Err(RegisterError::OutOfMemoryRange {
                        index: i.wrapping_add(1),
                        memory: indices.len(),
                    }
                    .into());
                }
                let n = flatten(circuit, ctx, None)?;
                if !n.measurements.is_empty() {
                    return Err(CodegenError::UnsupportedGate("Measurement".into()));
                }
                let mut map: Vec<usize> = indices.iter().map(|q| q - 1).collect();
                for &(_, bit) in &n.ancillas {
                    let q = p.memory_size + out.ancillas.len();
                    out.ancillas.push((q, bit));
                    map.push(q);
                }
                let mut apps = Vec::new();
                for app in &n.apps {
                    apps.push(Emitted {
                        gate: app.gate.id.clone(),
                        reversed: app.reversed,
                        bits: app.qubits.iter().map(|&q| map[q - 1]).collect(),
                    });
                }
                out.blocks.push(Block::Execute(ExecuteBlock {
                    circuit: circuit.id().to_string(),
                    register: map,
                    prepare,
                    apps,
                }));
            }
            ProgramStep::Measure { register } => {
                let indices = resolve_register(register, p.memory_size, &p.global_registers)?;
                out.blocks.push(Block::Measure(indices.iter().map(|q| q - 1).collect()));
            }
        }
    }
    Ok(out)
}
