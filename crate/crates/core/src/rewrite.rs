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

//! Lowering of circuits into flat gate sequences.
//!
//! [`flatten`] inlines circuit references, substitutes gate-equivalent
//! circuits for a target model, expands `reverse` and turns fixed-value
//! maps into ancilla qubits. The result is a [`Netlist`]: a straight list
//! of primitive gate applications over absolute 1-based qubit indices.

use crate::linalg::DenseMatrix;
use crate::model::*;
use crate::resolver::{Key, Kind, ResolutionContext, ResolveError};
use crate::Scalar;
use num_complex::Complex;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Maximum nesting of circuit references and equivalence substitutions.
pub const MAX_DEPTH: usize = 32;
/// Widest netlist [`netlist_unitary`] will build a matrix for.
pub const MAX_UNITARY_WIDTH: usize = 12;

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("circuit reference cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("no equivalent circuit for {gate} under model `{model}`")]
    EquivalenceNotFound { gate: String, model: String },
    #[error("nesting deeper than {0} levels")]
    DepthExceeded(usize),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("operation on {target} leaves input {input} unmapped")]
    UnmappedInput { target: String, input: usize },
    #[error("map qubit {qubit} is outside the {size}-qubit circuit")]
    QubitOutOfRange { qubit: usize, size: usize },
    #[error("a measurement cannot be reversed")]
    ReversedMeasurement,
    #[error("netlist of width {0} is too wide for a dense unitary")]
    TooWide(usize),
    #[error("netlist contains measurements or ancillas")]
    NotUnitary,
    #[error("gate {0} is not registered")]
    UnknownGate(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateApplication {
    pub gate: Key,
    /// Position k feeds gate input k + 1.
    pub qubits: Vec<usize>,
    pub reversed: bool,
    pub bindings: BTreeMap<String, ComplexValue>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Netlist {
    /// Circuit qubits plus ancillas.
    pub width: usize,
    /// Number of qubits of the flattened circuit itself; ancillas follow.
    pub circuit_qubits: usize,
    pub apps: Vec<GateApplication>,
    /// `(index, initial bit)` of every allocated ancilla.
    pub ancillas: Vec<(usize, u8)>,
    /// `(number of applications before it, qubit)`.
    pub measurements: Vec<(usize, usize)>,
}

impl Netlist {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            circuit_qubits: width,
            apps: Vec::new(),
            ancillas: Vec::new(),
            measurements: Vec::new(),
        }
    }

    /// The inverse sequence: applications in reverse order, each adjointed.
    pub fn reversed(&self) -> Result<Netlist, RewriteError> {
        if !self.measurements.is_empty() {
            return Err(RewriteError::ReversedMeasurement);
        }
        let mut out = self.clone();
        out.apps.reverse();
        for a in &mut out.apps {
            a.reversed = !a.reversed;
        }
        Ok(out)
    }

    /// Serializes as a circuit with one operation per step.
    ///
    /// Ancillas become ordinary circuit qubits; their initial bits are
    /// recorded in the circuit's proprietary data.
    pub fn to_circuit(&self, id: &str, name: &str) -> Circuit {
        let mut c = Circuit::new(id, name, self.width);
        let mut measurements = self.measurements.iter().peekable();
        for (k, app) in self.apps.iter().enumerate() {
            while let Some(&&(_, q)) = measurements.peek().filter(|(pos, _)| *pos == k) {
                c.steps.push(vec![Operation::measurement(q)]);
                measurements.next();
            }
            let mut op = Operation::gate(&app.gate.id, &app.qubits);
            if let OperationTarget::Gate(r) = &mut op.target {
                r.agency = app.gate.agency.clone();
                r.version = app.gate.version.clone();
            }
            op.reverse = app.reversed;
            op.bindings = app.bindings.clone();
            c.steps.push(vec![op]);
        }
        for &(_, q) in measurements {
            c.steps.push(vec![Operation::measurement(q)]);
        }
        if !self.ancillas.is_empty() {
            let mut xml = String::from("<c:ProprietaryData>");
            for (q, v) in &self.ancillas {
                xml.push_str(&format!("<Ancilla qubit=\"{q}\" value=\"{v}\"/>"));
            }
            xml.push_str("</c:ProprietaryData>");
            c.proprietary_data = Some(OpaqueXml(xml));
        }
        c
    }
}

enum Item {
    App(GateApplication),
    Measure(usize),
}

struct Flattener<'a> {
    ctx: &'a ResolutionContext,
    model: Option<&'a str>,
    universal: BTreeSet<Key>,
    width: usize,
    ancillas: Vec<(usize, u8)>,
    stack: Vec<String>,
}

impl Flattener<'_> {
    fn ancilla(&mut self, bit: u8) -> usize {
        self.width += 1;
        self.ancillas.push((self.width, bit));
        self.width
    }

    fn enter(&mut self, name: String) -> Result<(), RewriteError> {
        if self.stack.contains(&name) {
            let mut cycle = self.stack.clone();
            cycle.push(name);
            return Err(RewriteError::CycleDetected(cycle));
        }
        if self.stack.len() >= MAX_DEPTH {
            return Err(RewriteError::DepthExceeded(MAX_DEPTH));
        }
        self.stack.push(name);
        Ok(())
    }

    /// Absolute qubits feeding inputs `1..=size` of an operation target.
    fn inputs(&mut self, op: &Operation, size: usize, abs: &[usize], target: &str) -> Result<Vec<usize>, RewriteError> {
        let mut out = Vec::with_capacity(size);
        for input in 1..=size {
            let m = op.maps.iter().find(|m| m.input == input).ok_or_else(|| RewriteError::UnmappedInput {
                target: target.to_string(),
                input,
            })?;
            out.push(match m.source {
                MapSource::Qubit(q) => *abs.get(q.wrapping_sub(1)).ok_or(RewriteError::QubitOutOfRange {
                    qubit: q,
                    size: abs.len(),
                })?,
                MapSource::Fixed(v) => self.ancilla(v),
            });
        }
        Ok(out)
    }

    fn circuit(&mut self, c: &Circuit, abs: &[usize]) -> Result<Vec<Item>, RewriteError> {
        let mut items = Vec::new();
        for step in &c.steps {
            for op in step {
                match &op.target {
                    OperationTarget::Measurement(q) => {
                        if op.reverse {
                            return Err(RewriteError::ReversedMeasurement);
                        }
                        let qubit = *abs
                            .get(q.wrapping_sub(1))
                            .ok_or(RewriteError::QubitOutOfRange { qubit: *q, size: abs.len() })?;
                        items.push(Item::Measure(qubit));
                    }
                    OperationTarget::Gate(r) => {
                        let (key, gate) = self.ctx.resolve_gate_entry(r)?;
                        let qubits = self.inputs(op, gate.size(), abs, &key.to_string())?;
                        let sub = self.gate(key.clone(), qubits, &op.bindings)?;
                        items.extend(if op.reverse { reverse_items(sub)? } else { sub });
                    }
                    OperationTarget::Circuit(r) => {
                        let (key, sub) = self.ctx.resolve_circuit_entry(r)?;
                        let qubits = self.inputs(op, sub.size, abs, &key.to_string())?;
                        self.enter(key.to_string())?;
                        let expanded = self.circuit(sub, &qubits)?;
                        self.stack.pop();
                        items.extend(if op.reverse { reverse_items(expanded)? } else { expanded });
                    }
                }
            }
        }
        Ok(items)
    }

    fn gate(
        &mut self,
        key: Key,
        qubits: Vec<usize>,
        bindings: &BTreeMap<String, ComplexValue>,
    ) -> Result<Vec<Item>, RewriteError> {
        let app = |key| {
            vec![Item::App(GateApplication {
                gate: key,
                qubits: qubits.clone(),
                reversed: false,
                bindings: bindings.clone(),
            })]
        };
        let Some(model) = self.model else {
            return Ok(app(key));
        };
        if let Some(eq) = self.ctx.equivalent_for(&key, model) {
            let mut abs = Vec::with_capacity(eq.circuit.size);
            for j in 1..=eq.circuit.size {
                let q = match eq.input_remapping.iter().find(|m| m.input == j) {
                    Some(QubitMap {
                        source: MapSource::Qubit(g),
                        ..
                    }) => *qubits.get(g.wrapping_sub(1)).ok_or(RewriteError::QubitOutOfRange {
                        qubit: *g,
                        size: qubits.len(),
                    })?,
                    Some(QubitMap {
                        source: MapSource::Fixed(v),
                        ..
                    }) => self.ancilla(*v),
                    None if eq.input_remapping.is_empty() && j <= qubits.len() => qubits[j - 1],
                    None => self.ancilla(0),
                };
                abs.push(q);
            }
            self.enter(key.to_string())?;
            let items = self.circuit(&eq.circuit, &abs)?;
            self.stack.pop();
            return Ok(items);
        }
        if self.universal.contains(&key) {
            Ok(app(key))
        } else {
            Err(RewriteError::EquivalenceNotFound {
                gate: key.to_string(),
                model: model.to_string(),
            })
        }
    }
}

fn reverse_items(mut items: Vec<Item>) -> Result<Vec<Item>, RewriteError> {
    items.reverse();
    for it in &mut items {
        match it {
            Item::App(a) => a.reversed = !a.reversed,
            Item::Measure(_) => return Err(RewriteError::ReversedMeasurement),
        }
    }
    Ok(items)
}

/// Gates that appear directly in the equivalence circuits of `model`.
pub fn universal_set(ctx: &ResolutionContext, model: &str) -> BTreeSet<Key> {
    let mut out = BTreeSet::new();
    for eq in ctx.equivalents_for_model(model) {
        for op in eq.circuit.steps.iter().flatten() {
            if let OperationTarget::Gate(r) = &op.target {
                if let Ok((k, _)) = ctx.resolve_gate_entry(r) {
                    out.insert(k.clone());
                }
            }
        }
    }
    out
}

/// Flattens `c` into primitive gate applications, substituting
/// equivalences for `model` when one is given.
pub fn flatten(c: &Circuit, ctx: &ResolutionContext, model: Option<&str>) -> Result<Netlist, RewriteError> {
    let mut f = Flattener {
        ctx,
        model,
        universal: model.map(|m| universal_set(ctx, m)).unwrap_or_default(),
        width: c.size,
        ancillas: Vec::new(),
        stack: vec![format!("{} {}", Kind::Circuit, c.id())],
    };
    let abs: Vec<usize> = (1..=c.size).collect();
    let items = f.circuit(c, &abs)?;
    let mut n = Netlist::new(f.width);
    n.circuit_qubits = c.size;
    n.ancillas = f.ancillas;
    for it in items {
        match it {
            Item::App(a) => n.apps.push(a),
            Item::Measure(q) => n.measurements.push((n.apps.len(), q)),
        }
    }
    Ok(n)
}

/// Embeds a gate matrix acting on `qubits` (input 1 first) into a
/// `width`-qubit operator, qubit 1 being the most significant bit.
pub fn embed<T: Scalar>(g: &DenseMatrix<T>, qubits: &[usize], width: usize) -> DenseMatrix<T> {
    let dim = 1usize << width;
    let k = qubits.len();
    let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (width - q)).collect();
    let all: usize = masks.iter().sum();
    let mut out = DenseMatrix::zeros(dim);
    for col in 0..dim {
        let local_col = masks
            .iter()
            .fold(0, |acc, &m| (acc << 1) | usize::from(col & m != 0));
        let rest = col & !all;
        for local_row in 0..(1usize << k) {
            let v = g[(local_row, local_col)];
            if v == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let mut row = rest;
            for (j, &m) in masks.iter().enumerate() {
                if local_row & (1 << (k - 1 - j)) != 0 {
                    row |= m;
                }
            }
            out[(row, col)] = v;
        }
    }
    out
}

/// Effective matrix of one application, adjointed when reversed.
pub fn application_matrix<T: Scalar>(app: &GateApplication, ctx: &ResolutionContext) -> Result<DenseMatrix<T>, RewriteError> {
    let gate = ctx
        .gate_by_key(&app.gate)
        .ok_or_else(|| RewriteError::UnknownGate(app.gate.to_string()))?;
    let m = gate.matrix::<T>(&app.bindings)?;
    Ok(if app.reversed { m.adjoint() } else { m })
}

/// Ordered product of the embedded application matrices.
pub fn netlist_unitary<T: Scalar>(n: &Netlist, ctx: &ResolutionContext) -> Result<DenseMatrix<T>, RewriteError> {
    if n.width > MAX_UNITARY_WIDTH {
        return Err(RewriteError::TooWide(n.width));
    }
    if !n.measurements.is_empty() || !n.ancillas.is_empty() {
        return Err(RewriteError::NotUnitary);
    }
    let mut u = DenseMatrix::identity(1 << n.width);
    for app in &n.apps {
        let e = embed(&application_matrix::<T>(app, ctx)?, &app.qubits, n.width);
        u = &e * &u;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stdgates::standard_library;

    fn ctx(extra: Vec<Instance>) -> ResolutionContext {
        let mut docs = vec![standard_library()];
        docs.extend(extra);
        ResolutionContext::build(docs).unwrap()
    }

    fn lib(members: Vec<CircuitMember>) -> Instance {
        Instance {
            circuit_libraries: vec![CircuitLibrary::new("circuits", members)],
            ..Instance::default()
        }
    }

    fn ids(n: &Netlist) -> Vec<(String, Vec<usize>)> {
        n.apps.iter().map(|a| (a.gate.id.clone(), a.qubits.clone())).collect()
    }

    #[test]
    fn embed_cnot_reversed_wires() {
        let ctx = ctx(vec![]);
        let cnot = ctx.resolve_gate(&Reference::to("C-NOT")).unwrap().matrix::<f64>(&BTreeMap::new()).unwrap();
        // Control on qubit 2, target qubit 1: |01> -> |11>.
        let e = embed(&cnot, &[2, 1], 2);
        assert_eq!(e[(3, 1)], Complex::new(1.0, 0.0));
        assert_eq!(e[(0, 0)], Complex::new(1.0, 0.0));
        assert_eq!(e[(2, 2)], Complex::new(1.0, 0.0));
    }

    #[test]
    fn cycle_is_detected() {
        let a = Circuit::new("A", "A", 1).step(vec![Operation::circuit("B", &[1])]);
        let b = Circuit::new("B", "B", 1).step(vec![Operation::circuit("A", &[1])]);
        let ctx = ctx(vec![lib(vec![CircuitMember::Circuit(a.clone()), CircuitMember::Circuit(b)])]);
        assert!(matches!(flatten(&a, &ctx, None), Err(RewriteError::CycleDetected(_))));
    }

    #[test]
    fn depth_limit() {
        let mut members = Vec::new();
        for i in 0..40 {
            let mut c = Circuit::new(&format!("c{i}"), "c", 1);
            c = c.step(vec![if i == 39 {
                Operation::gate("X", &[1])
            } else {
                Operation::circuit(&format!("c{}", i + 1), &[1])
            }]);
            members.push(CircuitMember::Circuit(c));
        }
        let ctx = ctx(vec![lib(members)]);
        let top = ctx.resolve_circuit(&Reference::to("c0")).unwrap();
        assert!(matches!(flatten(top, &ctx, None), Err(RewriteError::DepthExceeded(32))));
        let shallow = ctx.resolve_circuit(&Reference::to("c20")).unwrap();
        assert_eq!(flatten(shallow, &ctx, None).unwrap().apps.len(), 1);
    }

    #[test]
    fn reversed_circuit_reference() {
        let inner = Circuit::new("inner", "inner", 1)
            .step(vec![Operation::gate("S", &[1])])
            .step(vec![Operation::gate("H", &[1])]);
        let outer = Circuit::new("outer", "outer", 1).step(vec![Operation::circuit("inner", &[1]).reversed()]);
        let ctx = ctx(vec![lib(vec![CircuitMember::Circuit(inner)])]);
        let n = flatten(&outer, &ctx, None).unwrap();
        assert_eq!(ids(&n), vec![("H".into(), vec![1]), ("S".into(), vec![1])]);
        assert!(n.apps.iter().all(|a| a.reversed));
        let u = netlist_unitary::<f64>(&n, &ctx).unwrap();
        let fwd = netlist_unitary::<f64>(&n.reversed().unwrap(), &ctx).unwrap();
        assert!((&u * &fwd).max_abs_diff(&DenseMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn fixed_maps_allocate_ancillas() {
        let mut op = Operation::gate("C-NOT", &[1]);
        op.maps[0].input = 2;
        op.maps.push(QubitMap::fixed(1, 1));
        let c = Circuit::new("f", "f", 1).step(vec![op.clone(), ]).step(vec![op]);
        let ctx = ctx(vec![]);
        let n = flatten(&c, &ctx, None).unwrap();
        assert_eq!(n.width, 3);
        assert_eq!(n.ancillas, vec![(2, 1), (3, 1)]);
        assert_eq!(ids(&n), vec![("C-NOT".into(), vec![2, 1]), ("C-NOT".into(), vec![3, 1])]);
        assert!(matches!(netlist_unitary::<f64>(&n, &ctx), Err(RewriteError::NotUnitary)));
    }

    #[test]
    fn missing_equivalence_is_reported() {
        let eq = GateEquivalentCircuit {
            gate_reference: Reference::to("SWAP"),
            model: Some("cnot-only".into()),
            circuit: Circuit::new("swap3", "swap", 2)
                .step(vec![Operation::gate("C-NOT", &[1, 2])])
                .step(vec![Operation::gate("C-NOT", &[2, 1])])
                .step(vec![Operation::gate("C-NOT", &[1, 2])]),
            input_remapping: Vec::new(),
        };
        let ctx = ctx(vec![lib(vec![CircuitMember::Equivalent(eq)])]);
        let c = Circuit::new("h", "h", 1).step(vec![Operation::gate("H", &[1])]);
        assert!(matches!(
            flatten(&c, &ctx, Some("cnot-only")),
            Err(RewriteError::EquivalenceNotFound { .. })
        ));
        assert_eq!(flatten(&c, &ctx, None).unwrap().apps.len(), 1);
    }

    #[test]
    fn netlist_serializes_one_operation_per_step() {
        let c = Circuit::new("p", "p", 2)
            .step(vec![Operation::gate("H", &[1]), Operation::gate("X", &[2])])
            .step(vec![Operation::measurement(1)]);
        let ctx = ctx(vec![]);
        let n = flatten(&c, &ctx, None).unwrap();
        assert_eq!(n.measurements, vec![(2, 1)]);
        let out = n.to_circuit("flat", "flat");
        assert_eq!(out.steps.len(), 3);
        assert!(out.steps.iter().all(|s| s.len() == 1));
        assert_eq!(flatten(&out, &ctx, None).unwrap(), n);
    }
}
