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

mod common;

use common::*;
use qisxml::codegen::{emit_qcl, emit_qml, CodegenError};
use qisxml::genadder::gate_count;
use qisxml::model::*;
use qisxml::rewrite::flatten;

fn empty_program(memory: usize) -> Program {
    Program {
        identification: Identification::new("nothing"),
        name: None,
        memory_size: memory,
        memory_init: Vec::new(),
        global_registers: Vec::new(),
        steps: Vec::new(),
    }
}

fn inline(p: &mut Program, c: Circuit, register: RegisterSpec) {
    p.steps.push(ProgramStep::Execute {
        register,
        body: ExecuteBody::Inline(Box::new(c)),
    });
}

#[test]
fn qml_matches_the_golden_file() {
    let ctx = with_std(vec![fixture("adder2.qisxml")]);
    let qml = emit_qml(program(&ctx, "two_plus_one"), &ctx).unwrap();
    assert_eq!(qml, fixture_text("two_plus_one.qml"));
}

#[test]
fn qcl_differs_from_the_golden_file_only_in_names() {
    let ctx = with_std(vec![fixture("adder2.qisxml")]);
    let qcl = emit_qcl(program(&ctx, "two_plus_one"), &ctx).unwrap();
    let golden = fixture_text("two_plus_one.qcl");
    assert_eq!(qcl_calls(&qcl), qcl_calls(&golden));
    // Every identifier starting with `reg` becomes `R`.
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.contains("WARNING"))
            .map(|l| {
                let mut out = String::new();
                let mut word = String::new();
                for ch in l.chars().chain(std::iter::once('\n')) {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        word.push(ch);
                        continue;
                    }
                    out.push_str(if word.starts_with("reg") { "R" } else { &word });
                    word.clear();
                    out.push(ch);
                }
                out
            })
            .collect()
    };
    assert_eq!(strip(&qcl), strip(&golden));
}

#[test]
fn empty_program_outputs() {
    let ctx = with_std(Vec::new());
    let qcl = emit_qcl(&empty_program(3), &ctx).unwrap();
    assert!(qcl.contains("qureg memory[3];"));
    assert!(qcl.ends_with("for i=0 to 2{\n    measure memory[i],value;\n    print i,\"=\",value;\n}\n"));
    assert!(qcl_calls(&qcl).is_empty());
    let qml = emit_qml(&empty_program(3), &ctx).unwrap();
    assert!(qml_sequence(&qml).is_empty());
    let doc = roxmltree::Document::parse(&qml).unwrap();
    let steps: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("Operation")).collect();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0].attribute("Step"), Some("0"));
}

#[test]
fn deutsch_gate_is_outside_both_dialects() {
    let ctx = with_std(Vec::new());
    let mut p = empty_program(3);
    inline(&mut p, Circuit::new("d", "d", 3).step(vec![Operation::gate("DEUTSCH", &[1, 2, 3])]), RegisterSpec::whole(3));
    assert!(matches!(emit_qcl(&p, &ctx), Err(CodegenError::UnsupportedGate(g)) if g == "DEUTSCH"));
    assert!(matches!(emit_qml(&p, &ctx), Err(CodegenError::UnsupportedGate(g)) if g == "DEUTSCH"));
}

#[test]
fn qcl_only_gates() {
    let ctx = with_std(Vec::new());
    let mut p = empty_program(2);
    let c = Circuit::new("c", "c", 2)
        .step(vec![Operation::gate("S", &[1]).reversed(), Operation::gate("T", &[2])])
        .step(vec![Operation::gate("SWAP", &[2, 1])]);
    inline(&mut p, c, RegisterSpec::whole(2));
    let qcl = emit_qcl(&p, &ctx).unwrap();
    let calls = qcl_calls(&qcl);
    assert_eq!(
        calls,
        vec![("!S".into(), vec![0]), ("T".into(), vec![1]), ("Swap".into(), vec![1, 0])]
    );
    assert!(matches!(emit_qml(&p, &ctx), Err(CodegenError::UnsupportedGate(g)) if g == "S"));
}

#[test]
fn six_plus_seven_qml_steps() {
    let ctx = with_std(vec![fixture("six_plus_seven.qisxml")]);
    let qml = emit_qml(program(&ctx, "six_plus_seven"), &ctx).unwrap();
    let seq = qml_sequence(&qml);
    let prepare: Vec<_> = seq.iter().filter(|(s, _, _)| *s == 1).map(|(_, _, b)| b[0]).collect();
    assert_eq!(prepare, vec![3, 6, 1, 4, 7]);
    let apps = seq.iter().filter(|(s, _, _)| *s > 1).count();
    assert_eq!(apps, gate_count(5));
    assert_eq!(apps, 35);
}

#[test]
fn register_aliases_map_to_memory() {
    let ctx = with_std(Vec::new());
    let mut p = empty_program(4);
    let c = Circuit::new("c", "c", 2).step(vec![Operation::gate("C-NOT", &[1, 2])]);
    let mut reg = RegisterSpec::indices(&[4, 2]);
    reg.prepare.push(QubitSetSpec {
        targets: vec![QubitSelector::Index(1)],
        value: ComplexValue::real(1.0),
    });
    inline(&mut p, c.clone(), reg);
    inline(&mut p, c, RegisterSpec::indices(&[1, 3]));
    p.steps.push(ProgramStep::Measure {
        register: RegisterSpec::indices(&[2]),
    });
    let qcl = emit_qcl(&p, &ctx).unwrap();
    assert!(qcl.contains("qureg reg_x1 = memory[3]&memory[1];"));
    assert!(qcl.contains("if value != 1 { X(reg_x1[0]); }"));
    assert!(qcl.contains("measure memory[1],value;\nprint 1,\"=\",value;"));
    assert!(!qcl.contains("for i=0"));
    assert_eq!(qcl_calls(&qcl), vec![("CNot".into(), vec![1, 3]), ("CNot".into(), vec![2, 0])]);
    let qml = emit_qml(&p, &ctx).unwrap();
    let seq: Vec<_> = qml_sequence(&qml).into_iter().map(|(_, k, b)| (k, b)).collect();
    assert_eq!(
        seq,
        vec![("PAULI_X".into(), vec![3]), ("CNOT".into(), vec![3, 1]), ("CNOT".into(), vec![0, 2])]
    );
}

#[test]
fn qml_rejects_a_second_prepare() {
    let ctx = with_std(Vec::new());
    let mut p = empty_program(1);
    let c = Circuit::new("c", "c", 1).step(vec![Operation::gate("X", &[1])]);
    let mut reg = RegisterSpec::whole(1);
    reg.prepare.push(QubitSetSpec {
        targets: vec![QubitSelector::Index(1)],
        value: ComplexValue::real(1.0),
    });
    inline(&mut p, c.clone(), RegisterSpec::whole(1));
    inline(&mut p, c, reg);
    assert!(matches!(emit_qml(&p, &ctx), Err(CodegenError::UnsupportedPrepare(_))));
    assert!(emit_qcl(&p, &ctx).is_ok());
}

#[test]
fn emitted_sequences_follow_the_netlist() {
    for bits in 1..=6 {
        let ctx = adder_context(bits);
        let p = addition_program(bits, 1, (1 << bits) - 1);
        let c = ctx.resolve_circuit(&Reference::to(format!("adder{bits}"))).unwrap();
        let n = flatten(c, &ctx, None).unwrap();
        let netlist: Vec<Vec<usize>> = n.apps.iter().map(|a| a.qubits.iter().map(|q| q - 1).collect()).collect();
        let qml: Vec<Vec<usize>> = qml_sequence(&emit_qml(&p, &ctx).unwrap())
            .into_iter()
            .filter(|(s, _, _)| *s > 1)
            .map(|(_, _, b)| b)
            .collect();
        assert_eq!(qml, netlist);
        // QCL lists the target first.
        let qcl: Vec<Vec<usize>> = qcl_calls(&emit_qcl(&p, &ctx).unwrap())
            .into_iter()
            .map(|(_, mut q)| {
                let t = q.remove(0);
                q.push(t);
                q
            })
            .collect();
        assert_eq!(qcl, netlist);
    }
}
