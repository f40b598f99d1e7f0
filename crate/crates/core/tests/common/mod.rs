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

#![allow(dead_code)]

use qisxml::model::{Instance, Program, Reference};
use qisxml::resolver::ResolutionContext;
use qisxml::stdgates::standard_library;
use qisxml::xmlio::{has_errors, parse_instance};
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Parses a fixture, panicking on structural errors.
pub fn fixture(name: &str) -> Instance {
    let (inst, diags) = parse_instance(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert!(!has_errors(&diags), "{name}: {diags:?}");
    inst
}

/// Context over `docs` plus the standard gates.
pub fn with_std(docs: Vec<Instance>) -> ResolutionContext {
    let mut all = docs;
    all.push(standard_library());
    ResolutionContext::build(all).expect("context")
}

pub fn program<'a>(ctx: &'a ResolutionContext, id: &str) -> &'a Program {
    ctx.resolve_program(&Reference::to(id)).expect("program")
}

use qisxml::genadder::{generate_addition_program, generate_document};
use qisxml::model::{Circuit, ExecuteBody, Identification, Operation, ProgramStep, RegisterSpec};
use std::collections::HashMap;

/// One-qubit program running H once; every qubit is measured at the end.
pub fn h_program() -> Program {
    let c = Circuit::new("h1", "h1", 1).step(vec![Operation::gate("H", &[1])]);
    Program {
        identification: Identification::new("h_once"),
        name: None,
        memory_size: 1,
        memory_init: Vec::new(),
        global_registers: Vec::new(),
        steps: vec![ProgramStep::Execute {
            register: RegisterSpec::whole(1),
            body: ExecuteBody::Inline(Box::new(c)),
        }],
    }
}

/// Context holding `adder{bits}` and the standard gates.
pub fn adder_context(bits: usize) -> ResolutionContext {
    with_std(vec![generate_document(bits, None).unwrap()])
}

pub fn addition_program(bits: usize, a: u128, b: u128) -> Program {
    generate_addition_program(bits, a, b).unwrap()
}

/// Gate calls of QCL source as `(name, qubits)`, every qubit resolved
/// through the register aliases to a 0-based memory index. For `CNot`
/// the target comes first, then the controls.
pub fn qcl_calls(src: &str) -> Vec<(String, Vec<usize>)> {
    let mut alias: HashMap<String, Vec<usize>> = HashMap::new();
    let mut memory = 0;
    let term = |alias: &HashMap<String, Vec<usize>>, t: &str| -> Vec<usize> {
        let t = t.trim();
        match t.split_once('[') {
            Some((name, rest)) => {
                let i: usize = rest.trim_end_matches(']').parse().expect("index");
                vec![alias[name][i]]
            }
            None => alias[t].clone(),
        }
    };
    let expr = |alias: &HashMap<String, Vec<usize>>, e: &str| -> Vec<usize> {
        e.split('&').flat_map(|t| term(alias, t)).collect()
    };
    let mut calls = Vec::new();
    for line in src.lines().map(str::trim) {
        let Some(line) = line.strip_suffix(';') else { continue };
        if let Some(decl) = line.strip_prefix("qureg ") {
            if let Some((name, e)) = decl.split_once('=') {
                let q = expr(&alias, e);
                alias.insert(name.trim().to_string(), q);
            } else if let Some((name, n)) = decl.split_once('[') {
                let n: usize = n.trim_end_matches(']').parse().unwrap();
                let base = if name == "memory" { 0 } else { memory };
                if name == "memory" {
                    memory = n;
                }
                alias.insert(name.to_string(), (base..base + n).collect());
            }
            continue;
        }
        let Some((name, args)) = line.split_once('(') else { continue };
        let args = args.trim_end_matches(')');
        if !name.chars().all(|c| c == '!' || c.is_ascii_alphabetic()) || name.is_empty() {
            continue;
        }
        if matches!(name, "measure" | "print" | "if" | "for") {
            continue;
        }
        let qubits = match args.split_once(',') {
            Some((a, b)) => {
                let mut q = term(&alias, a);
                q.extend(expr(&alias, b));
                q
            }
            None => term(&alias, args),
        };
        calls.push((name.to_string(), qubits));
    }
    calls
}

/// `(Gate Type, Bits)` of every Application in a QML document, in order.
pub fn qml_sequence(xml: &str) -> Vec<(u32, String, Vec<usize>)> {
    let doc = roxmltree::Document::parse(xml).expect("well-formed QML");
    let mut out = Vec::new();
    for op in doc.descendants().filter(|n| n.has_tag_name("Operation")) {
        let step: u32 = op.attribute("Step").unwrap().parse().unwrap();
        for app in op.children().filter(|n| n.has_tag_name("Application")) {
            let kind = app
                .children()
                .find(|n| n.has_tag_name("Gate"))
                .and_then(|g| g.attribute("Type"))
                .unwrap()
                .to_string();
            let bits = app.attribute("Bits").unwrap().split(',').map(|b| b.parse().unwrap()).collect();
            out.push((step, kind, bits));
        }
    }
    out
}
