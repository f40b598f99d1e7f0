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
use qisxml::model::*;
use qisxml::xmlio::{has_errors, parse_instance, serialize_instance, XmlError};
use std::collections::BTreeMap;

fn all_fixtures() -> Vec<String> {
    let mut out = Vec::new();
    for dir in ["", "invalid"] {
        for e in std::fs::read_dir(fixture_path(dir)).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "qisxml") {
                out.push(p.strip_prefix(fixture_path("")).unwrap().display().to_string());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn every_fixture_round_trips() {
    let names = all_fixtures();
    assert!(names.len() >= 20);
    for name in names {
        let (inst, diags) = parse_instance(&fixture_text(&name)).unwrap();
        if has_errors(&diags) {
            continue;
        }
        let text = serialize_instance(&inst);
        let (again, diags) = parse_instance(&text).unwrap();
        assert!(!has_errors(&diags), "{name}");
        assert_eq!(again, inst, "{name}");
        assert_eq!(serialize_instance(&again), text, "{name}: serializer not stable");
    }
}

#[test]
fn pauli_z_fragment() {
    let inst = fixture("sample_gates.qisxml");
    let z = inst.gates().find(|g| g.identification.id == "Z").unwrap();
    assert_eq!(z.name, "Pauli-Z");
    let m: qisxml::Matrix = z.matrix(&BTreeMap::new()).unwrap();
    assert_eq!(m[(0, 0)].re, 1.0);
    assert_eq!(m[(1, 1)].re, -1.0);
    assert_eq!(m[(0, 1)].norm(), 0.0);
}

#[test]
#[allow(clippy::approx_constant)]
fn hadamard_keeps_both_symbolic_forms() {
    let inst = fixture("sample_gates.qisxml");
    let h = inst.gates().find(|g| g.identification.id == "H").unwrap();
    let mult = &h.transformation.multiplier;
    assert_eq!(mult.re, 0.707106781);
    let syntaxes: Vec<_> = mult.symbolic.iter().map(|s| s.syntax.as_deref()).collect();
    assert_eq!(syntaxes, vec![Some("odf"), Some("html")]);
}

#[test]
fn six_plus_seven_program_shape() {
    let inst = fixture("six_plus_seven.qisxml");
    let p = inst.programs().next().unwrap();
    assert_eq!(p.identification.id, "six_plus_seven");
    assert_eq!(p.memory_size, 15);
    assert_eq!(p.steps.len(), 2);
    let ProgramStep::Execute { register, body } = &p.steps[0] else { panic!() };
    assert_eq!(register.size, 15);
    let prepared: Vec<_> = register.prepare[0].targets.clone();
    let idx = |v: &[usize]| v.iter().map(|&i| QubitSelector::Index(i)).collect::<Vec<_>>();
    assert_eq!(prepared, idx(&[4, 7, 2, 5, 8]));
    assert!(register.prepare[0].value.is_one());
    assert_eq!(body, &ExecuteBody::Reference(Reference::to("adder5")));
    let ProgramStep::Measure { register } = &p.steps[1] else { panic!() };
    assert_eq!(register.selectors, idx(&[2, 5, 8, 11, 14, 15]));
}

#[test]
fn two_plus_one_program_shape() {
    let inst = fixture("adder2.qisxml");
    let p = inst.programs().find(|p| p.identification.id == "two_plus_one").unwrap();
    assert_eq!(p.name.as_deref(), Some("Two plus One"));
    assert_eq!(p.steps.len(), 1);
}

#[test]
fn phase_flip_and_swap_equivalent_shapes() {
    let pf = fixture("phase_flip.qisxml");
    let c = pf.circuits().next().unwrap();
    assert_eq!((c.size, c.steps.len()), (3, 3));
    assert_eq!(c.steps[2].len(), 3);
    let sw = fixture("swap_equivalent.qisxml");
    let e = sw.equivalents().next().unwrap();
    assert_eq!(e.gate_reference.id, "SWAP");
    assert_eq!(e.circuit.steps.len(), 3);
    assert_eq!(e.circuit.steps[1][0].maps[0], QubitMap::qubit(1, 2));
}

#[test]
fn unknown_root_namespace_is_rejected() {
    let r = parse_instance(r#"<QIS xmlns="urn:other"/>"#);
    assert!(matches!(r, Err(XmlError::WrongRootNamespace { .. })), "{r:?}");
    assert!(matches!(parse_instance("<i:QIS"), Err(XmlError::NotWellFormed { .. })));
}

#[test]
fn empty_instance_is_an_empty_root() {
    let text = serialize_instance(&Instance::default());
    let (inst, diags) = parse_instance(&text).unwrap();
    assert!(diags.is_empty());
    assert_eq!(inst, Instance::default());
    assert!(text.trim_end().ends_with("/>"));
}

#[test]
fn unknown_elements_warn_and_are_skipped() {
    let text = fixture_text("phase_flip.qisxml").replace(
        "<c:Name>3-qubit phase flip code</c:Name>",
        "<c:Name>3-qubit phase flip code</c:Name><c:Colour>blue</c:Colour>",
    );
    let (inst, diags) = parse_instance(&text).unwrap();
    assert!(!has_errors(&diags));
    assert_eq!(diags.len(), 1);
    assert!(diags[0].path.contains("Colour"), "{}", diags[0].path);
    assert_eq!(inst, fixture("phase_flip.qisxml"));
}
