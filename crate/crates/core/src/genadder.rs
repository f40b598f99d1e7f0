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

//! Ripple-carry adder generator.
//!
//! Bit `i` of the adder occupies three consecutive qubits: `a_i` at
//! `3i+1`, `b_i` at `3i+2` and the carry `c_i` at `3i+3`. After the
//! circuit runs, `b_i` holds sum bit `i` and `c_{n-1}` the carry out;
//! every lower carry is returned to 0.

use crate::model::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenAdderError {
    #[error("adder width must be at least 1")]
    ZeroWidth,
    #[error("operand {value} does not fit in {bits} bit(s)")]
    OutOfRange { value: u128, bits: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdderLayout {
    pub bits: usize,
}

impl AdderLayout {
    pub fn new(bits: usize) -> Self {
        Self { bits }
    }

    pub fn width(&self) -> usize {
        3 * self.bits
    }

    pub fn a(&self, i: usize) -> usize {
        3 * i + 1
    }

    pub fn b(&self, i: usize) -> usize {
        3 * i + 2
    }

    pub fn carry(&self, i: usize) -> usize {
        3 * i + 3
    }

    /// Qubits read out for the sum: `b_0..b_{n-1}`, then the top carry.
    pub fn sum_qubits(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.bits).map(|i| self.b(i)).collect();
        out.push(self.carry(self.bits - 1));
        out
    }
}

pub fn circuit_id(bits: usize) -> String {
    format!("adder{bits}")
}

/// Number of gate applications in [`generate_adder`]`(bits)`.
pub fn gate_count(bits: usize) -> usize {
    if bits == 1 {
        2
    } else {
        9 * bits - 10
    }
}

/// The `bits`-bit adder circuit, one gate per step.
pub fn generate_adder(bits: usize) -> Result<Circuit, GenAdderError> {
    if bits == 0 {
        return Err(GenAdderError::ZeroWidth);
    }
    let l = AdderLayout::new(bits);
    let mut ops = Vec::new();
    let toffoli = |x, y, z| Operation::gate("TOFFOLI", &[x, y, z]);
    let cnot = |x, y| Operation::gate("C-NOT", &[x, y]);
    for i in 0..bits {
        ops.push(toffoli(l.a(i), l.b(i), l.carry(i)));
        ops.push(cnot(l.a(i), l.b(i)));
        if i > 0 {
            ops.push(toffoli(l.carry(i - 1), l.b(i), l.carry(i)));
            ops.push(cnot(l.carry(i - 1), l.b(i)));
        }
    }
    // Clear the intermediate carries, top down, restoring each sum bit.
    for i in (1..bits.saturating_sub(1)).rev() {
        ops.push(cnot(l.carry(i - 1), l.b(i)));
        ops.push(toffoli(l.carry(i - 1), l.b(i), l.carry(i)));
        ops.push(toffoli(l.a(i), l.b(i), l.carry(i)));
        ops.push(cnot(l.a(i), l.carry(i)));
        ops.push(cnot(l.carry(i - 1), l.b(i)));
    }
    if bits > 1 {
        ops.push(toffoli(l.a(0), l.b(0), l.carry(0)));
        ops.push(cnot(l.a(0), l.carry(0)));
    }
    let mut c = Circuit::new(&circuit_id(bits), &format!("{bits}-qubit adder"), l.width());
    c.description = Some(format!(
        "Adds two {bits}-bit numbers stored in qubits 3i+1 and 3i+2; the sum replaces the second operand."
    ));
    c.steps = ops.into_iter().map(|op| vec![op]).collect();
    Ok(c)
}

fn check(value: u128, bits: usize) -> Result<(), GenAdderError> {
    if bits < 128 && value >> bits != 0 {
        return Err(GenAdderError::OutOfRange { value, bits });
    }
    Ok(())
}

/// Program computing `a + b` with [`generate_adder`]`(bits)`, referenced
/// by id.
pub fn generate_addition_program(bits: usize, a: u128, b: u128) -> Result<Program, GenAdderError> {
    if bits == 0 {
        return Err(GenAdderError::ZeroWidth);
    }
    check(a, bits)?;
    check(b, bits)?;
    let l = AdderLayout::new(bits);
    let set = |v: u128, f: &dyn Fn(usize) -> usize| -> Vec<QubitSelector> {
        (0..bits).filter(|&i| (v >> i) & 1 == 1).map(|i| QubitSelector::Index(f(i))).collect()
    };
    let mut targets = set(a, &|i| l.a(i));
    targets.extend(set(b, &|i| l.b(i)));
    let mut register = RegisterSpec::whole(l.width());
    if !targets.is_empty() {
        register.prepare.push(QubitSetSpec {
            targets,
            value: ComplexValue::real(1.0),
        });
    }
    Ok(Program {
        identification: Identification::new(format!("add{bits}_{a}_{b}")),
        name: Some(format!("{a} plus {b}")),
        memory_size: l.width(),
        memory_init: Vec::new(),
        global_registers: Vec::new(),
        steps: vec![
            ProgramStep::Execute {
                register,
                body: ExecuteBody::Reference(Reference::to(circuit_id(bits))),
            },
            ProgramStep::Measure {
                register: RegisterSpec::indices(&l.sum_qubits()),
            },
        ],
    })
}

/// Reads the sum from measured bits listed in [`AdderLayout::sum_qubits`] order.
pub fn decode_sum(bits: &[u8]) -> u128 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u128::from(b) << i))
}

/// A document holding the adder circuit and, optionally, an addition program.
pub fn generate_document(bits: usize, add: Option<(u128, u128)>) -> Result<Instance, GenAdderError> {
    let mut inst = Instance {
        circuit_libraries: vec![CircuitLibrary::new(
            "genadder",
            vec![CircuitMember::Circuit(generate_adder(bits)?)],
        )],
        ..Instance::default()
    };
    if let Some((a, b)) = add {
        inst.program_libraries
            .push(ProgramLibrary::new("genadder-programs", vec![generate_addition_program(bits, a, b)?]));
    }
    Ok(inst)
}
