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
use qisxml::genadder::*;
use qisxml::model::*;
use qisxml::sim::run_program;
use qisxml::xmlio::{parse_instance, serialize_instance};

fn add(bits: usize, a: u128, b: u128) -> u128 {
    let ctx = adder_context(bits);
    let r = run_program(&addition_program(bits, a, b), &ctx, 0, 1).unwrap();
    let l = AdderLayout::new(bits);
    decode_sum(&l.sum_qubits().into_iter().map(|q| r[0].bit(q).unwrap()).collect::<Vec<_>>())
}

#[test]
fn exhaustive_small_widths() {
    for bits in 1..=3 {
        for a in 0..1 << bits {
            for b in 0..1 << bits {
                assert_eq!(add(bits, a, b), a + b, "n={bits}");
            }
        }
    }
}

#[test]
fn wider_adders_on_edge_operands() {
    for bits in [4, 8, 12, 16, 24, 32] {
        let max = (1u128 << bits) - 1;
        for (a, b) in [(0, 0), (max, 1), (1, max), (max, max), (max / 3, max / 5)] {
            assert_eq!(add(bits, a, b), a + b, "n={bits} {a}+{b}");
        }
    }
}

#[test]
fn only_permutation_gates() {
    let ctx = with_std(Vec::new());
    for bits in 1..=8 {
        for op in generate_adder(bits).unwrap().steps.iter().flatten() {
            let OperationTarget::Gate(r) = &op.target else { panic!() };
            let m: qisxml::Matrix = ctx.resolve_gate(r).unwrap().matrix(&Default::default()).unwrap();
            assert!(m.is_permutation());
        }
    }
}

#[test]
fn document_round_trips_and_validates() {
    let doc = generate_document(3, Some((5, 6))).unwrap();
    let (again, _) = parse_instance(&serialize_instance(&doc)).unwrap();
    assert_eq!(again, doc);
    let ctx = with_std(vec![doc.clone()]);
    let rep = qisxml::validate::validate_instance(&doc, &ctx);
    assert_eq!(rep.error_count(), 0, "{}", rep.render());
    let p = program(&ctx, "add3_5_6");
    let r = run_program(p, &ctx, 0, 1).unwrap();
    assert_eq!(r[0].dump(), "2=1 5=1 8=0 9=1");
}
