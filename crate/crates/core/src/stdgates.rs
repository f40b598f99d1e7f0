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

//! The standard gate library.
//!
//! Matrices follow the crate-wide convention: gate input 1 is the most
//! significant bit of the 1-based row/column index, and controls sit on
//! the lowest-numbered inputs.

use crate::model::*;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

pub const LIBRARY_ID: &str = "stdgates";
pub const AGENCY: &str = "org.qisxml";

/// Ids of every gate in [`standard_library`], in library order.
pub const GATE_IDS: [&str; 17] = [
    "H", "I", "X", "Y", "Z", "S", "R", "SQRT-NOT", "T", "C-NOT", "C-T", "C-PHASE", "C-Z", "DEUTSCH", "FREDKIN",
    "SWAP", "TOFFOLI",
];

const TOFFOLI_DESCRIPTION: &str = "The Toffoli gate is a reversible gate that takes three bits as input. \
The first two are control bits and are left unchanged by the gate. The third bit is flipped if both \
control bits are equal to 1. It is also known as the \"controlled-controlled-not\" gate";

fn one() -> ComplexValue {
    ComplexValue::real(1.0)
}

fn diagonal(size: usize, last: ComplexValue) -> SparseUnitary {
    let dim = 1 << size;
    let mut t = SparseUnitary::new(size);
    for k in 1..dim {
        t.cells.insert((k, k), one());
    }
    t.cells.insert((dim, dim), last);
    t
}

fn swap_rows(size: usize, a: usize, b: usize) -> SparseUnitary {
    SparseUnitary::permutation(size, |c| {
        if c == a {
            b
        } else if c == b {
            a
        } else {
            c
        }
    })
}

fn eighth_turn() -> ComplexValue {
    ComplexValue::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2).with_symbolic(None, "exp(i*pi/4)")
}

fn theta() -> GateParameter {
    GateParameter {
        name: "theta".into(),
        default: Some(ComplexValue::real(FRAC_PI_2).with_symbolic(None, "pi/2")),
    }
}

fn gate(id: &str, name: &str, t: SparseUnitary) -> Gate {
    Gate::new(id, name, t)
}

pub fn hadamard() -> Gate {
    let t = SparseUnitary::new(1)
        .with_multiplier(ComplexValue::real(FRAC_1_SQRT_2).with_symbolic(None, "1/sqrt(2)"))
        .cell(1, 1, one())
        .cell(1, 2, one())
        .cell(2, 1, one())
        .cell(2, 2, ComplexValue::real(-1.0));
    gate("H", "Hadamard", t)
}

pub fn toffoli() -> Gate {
    let mut g = gate("TOFFOLI", "Toffoli", swap_rows(3, 7, 8));
    g.nickname = Some("controlled-controlled-not".into());
    g.description = Some(TOFFOLI_DESCRIPTION.into());
    g
}

/// The seventeen standard gates.
pub fn standard_gates() -> Vec<Gate> {
    let mut r = gate(
        "R",
        "Phase Shift",
        SparseUnitary::new(1)
            .cell(1, 1, one())
            .cell(2, 2, ComplexValue::symbolic("exp(i*theta)")),
    );
    r.parameters.push(theta());

    let mut deutsch = gate("DEUTSCH", "Deutsch", SparseUnitary::new(3));
    for k in 1..=6 {
        deutsch.transformation.cells.insert((k, k), one());
    }
    for (row, col, expr) in [
        (7, 7, "i*cos(theta)"),
        (7, 8, "sin(theta)"),
        (8, 7, "sin(theta)"),
        (8, 8, "i*cos(theta)"),
    ] {
        deutsch.transformation.cells.insert((row, col), ComplexValue::symbolic(expr));
    }
    deutsch.parameters.push(theta());

    vec![
        hadamard(),
        gate("I", "Identity", diagonal(1, one())),
        gate("X", "Pauli-X", swap_rows(1, 1, 2)),
        gate(
            "Y",
            "Pauli-Y",
            SparseUnitary::new(1)
                .cell(1, 2, ComplexValue::new(0.0, -1.0))
                .cell(2, 1, ComplexValue::new(0.0, 1.0)),
        ),
        gate("Z", "Pauli-Z", diagonal(1, ComplexValue::real(-1.0))),
        gate("S", "Phase", diagonal(1, ComplexValue::new(0.0, 1.0))),
        r,
        gate(
            "SQRT-NOT",
            "Square Root of Not",
            SparseUnitary::new(1)
                .with_multiplier(ComplexValue::real(0.5))
                .cell(1, 1, ComplexValue::new(1.0, 1.0))
                .cell(1, 2, ComplexValue::new(1.0, -1.0))
                .cell(2, 1, ComplexValue::new(1.0, -1.0))
                .cell(2, 2, ComplexValue::new(1.0, 1.0)),
        ),
        gate("T", "π/8", diagonal(1, eighth_turn())),
        gate("C-NOT", "Controlled-NOT", swap_rows(2, 3, 4)),
        gate("C-T", "Controlled π/8", diagonal(2, eighth_turn())),
        gate("C-PHASE", "Controlled Phase", diagonal(2, ComplexValue::new(0.0, 1.0))),
        gate("C-Z", "Controlled-Z", diagonal(2, ComplexValue::real(-1.0))),
        deutsch,
        gate("FREDKIN", "Fredkin", swap_rows(3, 6, 7)),
        gate("SWAP", "Swap", swap_rows(2, 2, 3)),
        toffoli(),
    ]
}

/// The standard library wrapped in an instance document.
pub fn standard_library() -> Instance {
    let mut lib = GateLibrary::new(LIBRARY_ID, standard_gates());
    lib.identification.agency = Some(AGENCY.into());
    lib.name = Some("QIS-XML standard gates".into());
    Instance {
        gate_libraries: vec![lib],
        ..Instance::default()
    }
}

/// Serialized form of [`standard_library`], as shipped in `stdgates.qisxml`.
pub fn standard_library_xml() -> String {
    crate::xmlio::serialize_instance(&standard_library())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::EvalContext;
    use crate::linalg::DenseMatrix;
    use crate::resolver::{Kind, ResolutionContext};
    use num_complex::Complex;
    use std::collections::BTreeMap;

    fn matrix(id: &str) -> DenseMatrix<f64> {
        let g = standard_gates().into_iter().find(|g| g.identification.id == id).unwrap();
        g.matrix(&BTreeMap::new()).unwrap()
    }

    /// Builds a permutation matrix from a basis-state truth table, with
    /// input 1 as the most significant bit.
    fn truth_table(bits: usize, f: impl Fn(Vec<u8>) -> Vec<u8>) -> DenseMatrix<f64> {
        let dim = 1 << bits;
        let mut m = DenseMatrix::zeros(dim);
        for col in 0..dim {
            let input: Vec<u8> = (0..bits).map(|k| ((col >> (bits - 1 - k)) & 1) as u8).collect();
            let out = f(input);
            let row = out.iter().fold(0, |acc, &b| acc * 2 + b as usize);
            m[(row, col)] = Complex::new(1.0, 0.0);
        }
        m
    }

    #[test]
    fn library_has_the_seventeen_ids() {
        let ids: Vec<String> = standard_gates().into_iter().map(|g| g.identification.id).collect();
        assert_eq!(ids, GATE_IDS.map(String::from).to_vec());
        let ctx = ResolutionContext::build(vec![standard_library()]).unwrap();
        assert_eq!(ctx.count(Kind::Gate), 17);
    }

    #[test]
    fn every_gate_is_unitary() {
        for g in standard_gates() {
            let m: DenseMatrix<f64> = g.matrix(&BTreeMap::new()).unwrap();
            assert!(m.is_unitary(1e-9), "{} is not unitary", g.identification.id);
        }
    }

    #[test]
    fn hadamard_carries_symbolic_multiplier() {
        let h = hadamard();
        assert_eq!(h.transformation.multiplier.symbolic[0].expression, "1/sqrt(2)");
        assert_eq!(h.transformation.cells.len(), 4);
        assert_eq!(h.transformation.cells[&(2, 2)].re, -1.0);
    }

    #[test]
    fn toffoli_matches_truth_table() {
        let expected = truth_table(3, |b| vec![b[0], b[1], b[2] ^ (b[0] & b[1])]);
        assert_eq!(matrix("TOFFOLI"), expected);
    }

    #[test]
    fn cnot_matches_truth_table() {
        let expected = truth_table(2, |b| vec![b[0], b[1] ^ b[0]]);
        assert_eq!(matrix("C-NOT"), expected);
    }

    #[test]
    fn fredkin_and_swap_match_truth_tables() {
        let fredkin = truth_table(3, |b| if b[0] == 1 { vec![b[0], b[2], b[1]] } else { b });
        assert_eq!(matrix("FREDKIN"), fredkin);
        assert_eq!(matrix("SWAP"), truth_table(2, |b| vec![b[1], b[0]]));
    }

    #[test]
    fn permutation_gates() {
        for id in ["SWAP", "C-NOT", "TOFFOLI", "FREDKIN", "X"] {
            assert!(matrix(id).is_permutation(), "{id}");
        }
        assert!(!matrix("Z").is_permutation());
    }

    #[test]
    fn algebraic_identities() {
        let i2 = DenseMatrix::<f64>::identity(2);
        let sq = |id: &str| {
            let m = matrix(id);
            &m * &m
        };
        assert!(sq("H").max_abs_diff(&i2) < 1e-12);
        assert!(sq("X").max_abs_diff(&i2) < 1e-12);
        assert!(sq("Z").max_abs_diff(&i2) < 1e-12);
        assert!(sq("SQRT-NOT").max_abs_diff(&matrix("X")) < 1e-12);
        assert!(sq("S").max_abs_diff(&matrix("Z")) < 1e-12);
        let t2 = sq("T");
        assert!((&t2 * &t2).max_abs_diff(&matrix("Z")) < 1e-12);
        assert!(sq("C-PHASE").max_abs_diff(&matrix("C-Z")) < 1e-12);
    }

    #[test]
    fn phase_shift_at_pi_is_z() {
        let r = standard_gates().into_iter().find(|g| g.identification.id == "R").unwrap();
        let bind: BTreeMap<_, _> = [("theta".to_string(), ComplexValue::real(std::f64::consts::PI))].into();
        let m: DenseMatrix<f64> = r.matrix(&bind).unwrap();
        assert!(m.max_abs_diff(&matrix("Z")) < 1e-12);
        // Default theta is a quarter turn: R(pi/2) = S.
        assert!(matrix("R").max_abs_diff(&matrix("S")) < 1e-12);
    }

    #[test]
    fn deutsch_at_quarter_turn_is_toffoli() {
        assert!(matrix("DEUTSCH").max_abs_diff(&matrix("TOFFOLI")) < 1e-12);
        let d = standard_gates().into_iter().find(|g| g.identification.id == "DEUTSCH").unwrap();
        let m: DenseMatrix<f64> = d.transformation.effective_matrix(&EvalContext::new().with("theta", Complex::new(0.3, 0.0))).unwrap();
        assert!(m.is_unitary(1e-12));
    }

    #[test]
    fn shipped_file_matches_constructor() {
        let shipped = include_str!("../fixtures/stdgates.qisxml");
        assert_eq!(shipped, standard_library_xml());
    }
}
