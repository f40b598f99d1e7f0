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

//! Semantic checks that go beyond what the parser enforces.
//!
//! [`validate_instance`] walks every gate, circuit, equivalence and program
//! in a document and collects [`Finding`]s. [`ValidationReport::render`]
//! prints them in a step-by-step listing; [`ValidationReport::to_tsv`] is
//! the machine-readable form.

use crate::linalg::DenseMatrix;
use crate::model::*;
use crate::resolver::ResolutionContext;
use crate::sim::{resolve_register, RegisterError};
use crate::xmlio::Severity;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Stable finding codes.
pub mod codes {
    pub const MAP_INPUT_OUT_OF_RANGE: &str = "MAP_INPUT_OUT_OF_RANGE";
    pub const MAP_QUBIT_OUT_OF_RANGE: &str = "MAP_QUBIT_OUT_OF_RANGE";
    pub const DUPLICATE_QUBIT_IN_STEP: &str = "DUPLICATE_QUBIT_IN_STEP";
    pub const DUPLICATE_INPUT_IN_OPERATION: &str = "DUPLICATE_INPUT_IN_OPERATION";
    pub const UNRESOLVED_REFERENCE: &str = "UNRESOLVED_REFERENCE";
    pub const NON_UNITARY_TRANSFORMATION: &str = "NON_UNITARY_TRANSFORMATION";
    pub const QUBIT_NOT_NORMALIZED: &str = "QUBIT_NOT_NORMALIZED";
    pub const REGISTER_SIZE_MISMATCH: &str = "REGISTER_SIZE_MISMATCH";
    pub const REGISTER_OUT_OF_MEMORY: &str = "REGISTER_OUT_OF_MEMORY";
    pub const OPERATION_UNDER_MAPPED: &str = "OPERATION_UNDER_MAPPED";
    pub const SUBPROGRAM_UNSUPPORTED: &str = "SUBPROGRAM_UNSUPPORTED";
    pub const STEP_QUBITS_UNMAPPED: &str = "STEP_QUBITS_UNMAPPED";
    pub const UNUSED_DECLARATION: &str = "UNUSED_DECLARATION";
    pub const PARAMETRIC_UNITARITY_SKIPPED: &str = "PARAMETRIC_UNITARITY_SKIPPED";

    pub const ERRORS: [&str; 11] = [
        MAP_INPUT_OUT_OF_RANGE,
        MAP_QUBIT_OUT_OF_RANGE,
        DUPLICATE_QUBIT_IN_STEP,
        DUPLICATE_INPUT_IN_OPERATION,
        UNRESOLVED_REFERENCE,
        NON_UNITARY_TRANSFORMATION,
        QUBIT_NOT_NORMALIZED,
        REGISTER_SIZE_MISMATCH,
        REGISTER_OUT_OF_MEMORY,
        OPERATION_UNDER_MAPPED,
        SUBPROGRAM_UNSUPPORTED,
    ];
    pub const WARNINGS: [&str; 3] = [STEP_QUBITS_UNMAPPED, UNUSED_DECLARATION, PARAMETRIC_UNITARITY_SKIPPED];
}

use codes::*;

pub const UNITARITY_TOLERANCE: f64 = 1e-9;
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Location {
    pub library: String,
    pub object: String,
    pub step: Option<usize>,
    pub operation: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.library, self.object)?;
        if let Some(s) = self.step {
            write!(f, ":{s}")?;
            if let Some(o) = self.operation {
                write!(f, ".{o}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub location: Location,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperationReport {
    /// One-line description, e.g. `Hadamard (H) [1=1]`.
    pub summary: String,
    pub findings: Vec<Finding>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub title: String,
    pub findings: Vec<Finding>,
    pub operations: Vec<OperationReport>,
}

/// Everything reported about one gate, circuit, equivalence or program.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectReport {
    pub header: String,
    pub details: Vec<String>,
    pub findings: Vec<Finding>,
    pub steps: Vec<StepReport>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub objects: Vec<ObjectReport>,
}

impl ValidationReport {
    /// All findings in document order.
    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.objects.iter().flat_map(|o| {
            o.findings.iter().chain(
                o.steps
                    .iter()
                    .flat_map(|s| s.findings.iter().chain(s.operations.iter().flat_map(|op| op.findings.iter()))),
            )
        })
    }

    pub fn error_count(&self) -> usize {
        self.findings().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warning_count(&self) -> usize {
        self.findings().filter(|f| f.severity == Severity::Warning).count()
    }

    pub fn has_errors(&self) -> bool {
        self.error_count() > 0
    }

    pub fn summary(&self) -> String {
        format!("{} error(s), {} warning(s)", self.error_count(), self.warning_count())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let push_finding = |out: &mut String, f: &Finding| match f.severity {
            Severity::Error => out.push_str(&format!("ERROR: {}\n", f.message)),
            Severity::Warning => out.push_str(&format!(" Warning: {}\n", f.message)),
        };
        for o in &self.objects {
            out.push_str(&o.header);
            out.push('\n');
            for d in &o.details {
                out.push_str(&format!(" {d}\n"));
            }
            for f in &o.findings {
                push_finding(&mut out, f);
            }
            for s in &o.steps {
                out.push_str(&format!(" {}\n", s.title));
                for f in &s.findings {
                    push_finding(&mut out, f);
                }
                for (k, op) in s.operations.iter().enumerate() {
                    out.push_str(&format!(" {}: {}\n", k + 1, op.summary));
                    for f in &op.findings {
                        push_finding(&mut out, f);
                    }
                }
            }
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }

    /// `code<TAB>severity<TAB>location<TAB>message`, one finding per line.
    pub fn to_tsv(&self) -> String {
        self.findings()
            .map(|f| {
                let sev = match f.severity {
                    Severity::Error => "ERROR",
                    Severity::Warning => "WARNING",
                };
                format!("{}\t{sev}\t{}\t{}\n", f.code, f.location, f.message)
            })
            .collect()
    }
}

struct Checker<'a> {
    ctx: &'a ResolutionContext,
    loc: Location,
}

impl Checker<'_> {
    fn finding(&self, severity: Severity, code: &'static str, message: String) -> Finding {
        Finding {
            severity,
            code,
            location: self.loc.clone(),
            message,
        }
    }

    fn error(&self, code: &'static str, message: impl Into<String>) -> Finding {
        self.finding(Severity::Error, code, message.into())
    }

    fn warning(&self, code: &'static str, message: impl Into<String>) -> Finding {
        self.finding(Severity::Warning, code, message.into())
    }

    fn at(&mut self, step: Option<usize>, operation: Option<usize>) {
        self.loc.step = step;
        self.loc.operation = operation;
    }

    fn gate(&mut self, g: &Gate) -> ObjectReport {
        self.at(None, None);
        let mut findings = Vec::new();
        let referenced: BTreeSet<String> = g.transformation.referenced_names().into_iter().collect();
        for p in &g.parameters {
            if !referenced.contains(&p.name) {
                findings.push(self.warning(
                    UNUSED_DECLARATION,
                    format!("Parameter {} is never used by the transformation.", p.name),
                ));
            }
        }
        if g.is_parametric() {
            findings.push(self.warning(
                PARAMETRIC_UNITARITY_SKIPPED,
                "Unitarity not checked for a parametric gate.",
            ));
        } else {
            match g.matrix::<f64>(&BTreeMap::new()) {
                Ok(m) if m.is_unitary(UNITARITY_TOLERANCE) => {}
                Ok(_) => findings.push(self.error(NON_UNITARY_TRANSFORMATION, "Transformation is not unitary.")),
                Err(e) => findings.push(self.error(
                    NON_UNITARY_TRANSFORMATION,
                    format!("Transformation cannot be evaluated: {e}."),
                )),
            }
        }
        let mut details = vec![g.name.clone()];
        details.extend(g.description.clone());
        ObjectReport {
            header: format!("Gate {}, Size {}", g.identification.id, g.size()),
            details,
            findings,
            steps: Vec::new(),
        }
    }

    fn map_list(op: &Operation) -> String {
        let items: Vec<String> = op
            .maps
            .iter()
            .map(|m| match m.source {
                MapSource::Qubit(q) => format!("{q}={}", m.input),
                MapSource::Fixed(v) => format!("|{v}>={}", m.input),
            })
            .collect();
        format!("[{}]", items.join(","))
    }

    /// Checks one operation and returns its summary line and findings.
    /// Range checks on circuit qubits are done by the caller.
    fn operation(&self, op: &Operation) -> OperationReport {
        let mut findings = Vec::new();
        let rev = if op.reverse { " reversed" } else { "" };
        let (label, target_size, kind) = match &op.target {
            OperationTarget::Measurement(q) => {
                return OperationReport {
                    summary: format!("Measurement [{q}]"),
                    findings,
                }
            }
            OperationTarget::Gate(r) => match self.ctx.resolve_gate(r) {
                Ok(g) => (format!("{} ({})", g.name, g.identification.id), Some(g.size()), "Gate"),
                Err(e) => {
                    findings.push(self.error(UNRESOLVED_REFERENCE, format!("Gate reference {}: {e}.", r.id)));
                    (format!("? ({})", r.id), None, "Gate")
                }
            },
            OperationTarget::Circuit(r) => match self.ctx.resolve_circuit(r) {
                Ok(c) => (
                    format!("{} ({})", c.name.as_deref().unwrap_or(c.id()), c.id()),
                    Some(c.size),
                    "Circuit",
                ),
                Err(e) => {
                    findings.push(self.error(UNRESOLVED_REFERENCE, format!("Circuit reference {}: {e}.", r.id)));
                    (format!("? ({})", r.id), None, "Circuit")
                }
            },
        };
        let mut inputs = BTreeSet::new();
        for (pos, m) in op.maps.iter().enumerate() {
            if let Some(size) = target_size {
                if m.input == 0 || m.input > size {
                    findings.push(self.error(
                        MAP_INPUT_OUT_OF_RANGE,
                        format!("Map {pos} input={} is out of {kind} range.", m.input),
                    ));
                }
            }
            if !inputs.insert(m.input) {
                findings.push(self.error(
                    DUPLICATE_INPUT_IN_OPERATION,
                    format!("Map {pos} input={} is already mapped in this operation.", m.input),
                ));
            }
        }
        if let Some(size) = target_size {
            if inputs.len() < size {
                findings.push(self.error(
                    OPERATION_UNDER_MAPPED,
                    format!("Only {} of {size} inputs are mapped.", inputs.len()),
                ));
            }
        }
        OperationReport {
            summary: format!("{label} {}{rev}", Self::map_list(op)),
            findings,
        }
    }

    fn circuit_steps(&mut self, c: &Circuit) -> Vec<StepReport> {
        let mut steps = Vec::new();
        for (si, step) in c.steps.iter().enumerate() {
            self.at(Some(si + 1), None);
            let mut used = BTreeSet::new();
            let mut operations = Vec::new();
            for (oi, op) in step.iter().enumerate() {
                self.at(Some(si + 1), Some(oi + 1));
                let mut rep = self.operation(op);
                let mut in_range = Vec::new();
                for (pos, m) in op.maps.iter().enumerate() {
                    if let MapSource::Qubit(q) = m.source {
                        if q == 0 || q > c.size {
                            rep.findings.push(self.error(
                                MAP_QUBIT_OUT_OF_RANGE,
                                format!("Map {pos} qubit={q} is out of Circuit range."),
                            ));
                        } else {
                            in_range.push(q);
                        }
                    }
                }
                if let OperationTarget::Measurement(q) = op.target {
                    if q == 0 || q > c.size {
                        rep.findings.push(self.error(
                            MAP_QUBIT_OUT_OF_RANGE,
                            format!("Measured qubit {q} is out of Circuit range."),
                        ));
                    } else {
                        in_range.push(q);
                    }
                }
                for q in in_range {
                    if !used.insert(q) {
                        rep.findings.push(self.error(
                            DUPLICATE_QUBIT_IN_STEP,
                            format!("Qubit {q} is mapped more than once in this step."),
                        ));
                    }
                }
                operations.push(rep);
            }
            self.at(Some(si + 1), None);
            let mut findings = Vec::new();
            if used.len() < c.size {
                findings.push(self.warning(STEP_QUBITS_UNMAPPED, "Not all qubits have been mapped."));
            }
            steps.push(StepReport {
                title: format!("Step {}, {} operation(s)", si + 1, step.len()),
                findings,
                operations,
            });
        }
        self.at(None, None);
        steps
    }

    fn circuit(&mut self, c: &Circuit) -> ObjectReport {
        let steps = self.circuit_steps(c);
        let mut details = Vec::new();
        details.extend(c.name.clone());
        details.extend(c.description.clone());
        ObjectReport {
            header: format!("Circuit {}, Size {}, {} step(s)", c.id(), c.size, c.steps.len()),
            details,
            findings: Vec::new(),
            steps,
        }
    }

    fn equivalent(&mut self, e: &GateEquivalentCircuit) -> ObjectReport {
        let mut rep = self.circuit(&e.circuit);
        let model = e.model.as_deref().unwrap_or("-");
        rep.header = format!(
            "Equivalent circuit for {} (model {model}), Size {}, {} step(s)",
            e.gate_reference.id,
            e.circuit.size,
            e.circuit.steps.len()
        );
        let gate_size = match self.ctx.resolve_gate(&e.gate_reference) {
            Ok(g) => Some(g.size()),
            Err(err) => {
                rep.findings.push(self.error(
                    UNRESOLVED_REFERENCE,
                    format!("Gate reference {}: {err}.", e.gate_reference.id),
                ));
                None
            }
        };
        for (pos, m) in e.input_remapping.iter().enumerate() {
            if m.input == 0 || m.input > e.circuit.size {
                rep.findings.push(self.error(
                    MAP_QUBIT_OUT_OF_RANGE,
                    format!("Remap {pos} input={} is out of Circuit range.", m.input),
                ));
            }
            if let (MapSource::Qubit(q), Some(size)) = (m.source, gate_size) {
                if q == 0 || q > size {
                    rep.findings.push(self.error(
                        MAP_INPUT_OUT_OF_RANGE,
                        format!("Remap {pos} gate input={q} is out of Gate range."),
                    ));
                }
            }
        }
        rep
    }

    fn normalized(&self, values: &[&ComplexValue]) -> Result<bool, String> {
        let mut total = 0.0;
        for v in values {
            let mut warnings = Vec::new();
            let c = v
                .evaluate::<f64>(&crate::expr::EvalContext::new(), &mut warnings)
                .map_err(|e| e.to_string())?;
            total += c.norm_sqr();
        }
        Ok((total - 1.0).abs() <= NORMALIZATION_TOLERANCE)
    }

    fn register(&self, reg: &RegisterSpec, p: &Program, out: &mut Vec<Finding>) -> Option<Vec<usize>> {
        match resolve_register(reg, p.memory_size, &p.global_registers) {
            Ok(v) => Some(v),
            Err(e) => {
                let code = match e {
                    RegisterError::OutOfMemoryRange { .. } => REGISTER_OUT_OF_MEMORY,
                    RegisterError::SizeMismatch { .. } => REGISTER_SIZE_MISMATCH,
                    RegisterError::UnknownRegisterReference(_) => UNRESOLVED_REFERENCE,
                };
                out.push(self.error(code, format!("{e}.")));
                None
            }
        }
    }

    fn prepare(&self, reg: &RegisterSpec, out: &mut Vec<Finding>) {
        for set in &reg.prepare {
            for sel in &set.targets {
                let bad = match sel {
                    QubitSelector::Index(i) => (*i == 0 || *i > reg.size).then_some(*i),
                    QubitSelector::Range { start, end } => {
                        (*start == 0 || *end > reg.size || start > end).then_some(*end)
                    }
                    QubitSelector::Register(_) => None,
                };
                if let Some(i) = bad {
                    out.push(self.error(
                        REGISTER_OUT_OF_MEMORY,
                        format!("Prepare index {i} is outside the {}-qubit register.", reg.size),
                    ));
                }
            }
            let mut warnings = Vec::new();
            match set.value.evaluate::<f64>(&crate::expr::EvalContext::new(), &mut warnings) {
                Ok(a) if a.norm() <= 1.0 + NORMALIZATION_TOLERANCE => {}
                Ok(a) => out.push(self.error(
                    QUBIT_NOT_NORMALIZED,
                    format!("Prepare value with modulus {} cannot be normalized.", a.norm()),
                )),
                Err(e) => out.push(self.error(QUBIT_NOT_NORMALIZED, format!("Prepare value: {e}."))),
            }
        }
    }

    fn program(&mut self, p: &Program, extra: &mut Vec<ObjectReport>) -> ObjectReport {
        self.at(None, None);
        let mut findings = Vec::new();
        for q in &p.memory_init {
            if q.index == 0 || q.index > p.memory_size {
                findings.push(self.error(
                    REGISTER_OUT_OF_MEMORY,
                    format!("Qubit index {} is outside the {}-qubit memory.", q.index, p.memory_size),
                ));
            }
            match self.normalized(&[&q.zero, &q.one]) {
                Ok(true) => {}
                Ok(false) => findings.push(self.error(
                    QUBIT_NOT_NORMALIZED,
                    format!("Qubit {} amplitudes are not normalized.", q.index),
                )),
                Err(e) => findings.push(self.error(QUBIT_NOT_NORMALIZED, format!("Qubit {}: {e}.", q.index))),
            }
        }
        for g in &p.global_registers {
            self.register(g, p, &mut findings);
        }

        let mut referenced = BTreeSet::new();
        let mut steps = Vec::new();
        for (si, step) in p.steps.iter().enumerate() {
            self.at(Some(si + 1), None);
            let mut sf = Vec::new();
            let title = match step {
                ProgramStep::Execute { register, body } => {
                    collect_register_refs(register, p, &mut referenced);
                    self.register(register, p, &mut sf);
                    self.prepare(register, &mut sf);
                    let circuit = match body {
                        ExecuteBody::Inline(c) => {
                            let saved = self.loc.clone();
                            self.loc.object = format!("{}/{}", saved.object, c.id());
                            self.at(None, None);
                            extra.push(self.circuit(c));
                            self.loc = saved;
                            Some((c.as_ref(), c.id().to_string()))
                        }
                        ExecuteBody::Reference(r) => match self.ctx.resolve_circuit(r) {
                            Ok(c) => Some((c, r.id.clone())),
                            Err(e) => {
                                sf.push(self.error(UNRESOLVED_REFERENCE, format!("Circuit reference {}: {e}.", r.id)));
                                None
                            }
                        },
                        ExecuteBody::Subprogram(_) => {
                            sf.push(self.error(SUBPROGRAM_UNSUPPORTED, "Nested programs are not supported."));
                            None
                        }
                    };
                    if let Some((c, _)) = circuit {
                        if c.size != register.size {
                            sf.push(self.error(
                                REGISTER_SIZE_MISMATCH,
                                format!("Register size {} does not match circuit size {}.", register.size, c.size),
                            ));
                        }
                    }
                    let name = circuit.map(|(_, id)| id).unwrap_or_else(|| "?".into());
                    format!("Step {}, Execute {name} on {} qubit(s)", si + 1, register.size)
                }
                ProgramStep::Measure { register } => {
                    collect_register_refs(register, p, &mut referenced);
                    self.register(register, p, &mut sf);
                    format!("Step {}, Measure {} qubit(s)", si + 1, register.size)
                }
            };
            steps.push(StepReport {
                title,
                findings: sf,
                operations: Vec::new(),
            });
        }
        self.at(None, None);
        for g in &p.global_registers {
            if let Some(id) = &g.identification {
                if !referenced.contains(&id.id) {
                    findings.push(self.warning(UNUSED_DECLARATION, format!("Register {} is never used.", id.id)));
                }
            }
        }
        ObjectReport {
            header: format!(
                "Program {}, Memory {}, {} step(s)",
                p.identification.id,
                p.memory_size,
                p.steps.len()
            ),
            details: p.name.iter().cloned().collect(),
            findings,
            steps,
        }
    }
}

fn collect_register_refs(reg: &RegisterSpec, p: &Program, out: &mut BTreeSet<String>) {
    let sets = reg.prepare.iter().flat_map(|s| s.targets.iter());
    for sel in reg.selectors.iter().chain(sets) {
        if let QubitSelector::Register(r) = sel {
            if out.insert(r.id.clone()) {
                let target = p
                    .global_registers
                    .iter()
                    .find(|g| g.identification.as_ref().is_some_and(|i| i.id == r.id));
                if let Some(t) = target {
                    collect_register_refs(t, p, out);
                }
            }
        }
    }
}

/// Runs every rule over every object of `inst`.
pub fn validate_instance(inst: &Instance, ctx: &ResolutionContext) -> ValidationReport {
    let mut c = Checker {
        ctx,
        loc: Location::default(),
    };
    let mut objects = Vec::new();
    for lib in &inst.gate_libraries {
        for g in &lib.members {
            c.loc = Location {
                library: lib.identification.id.clone(),
                object: g.identification.id.clone(),
                ..Location::default()
            };
            objects.push(c.gate(g));
        }
    }
    for lib in &inst.circuit_libraries {
        for m in &lib.members {
            let object = match m {
                CircuitMember::Circuit(circ) => circ.id().to_string(),
                CircuitMember::Equivalent(e) => format!("{}@{}", e.gate_reference.id, e.model.as_deref().unwrap_or("-")),
            };
            c.loc = Location {
                library: lib.identification.id.clone(),
                object,
                ..Location::default()
            };
            objects.push(match m {
                CircuitMember::Circuit(circ) => c.circuit(circ),
                CircuitMember::Equivalent(e) => c.equivalent(e),
            });
        }
    }
    for lib in &inst.program_libraries {
        for p in &lib.members {
            c.loc = Location {
                library: lib.identification.id.clone(),
                object: p.identification.id.clone(),
                ..Location::default()
            };
            let mut extra = Vec::new();
            let rep = c.program(p, &mut extra);
            objects.push(rep);
            objects.extend(extra);
        }
    }
    ValidationReport { objects }
}

/// Unitarity check used by validation, exposed for tests and tools.
pub fn is_unitary(m: &DenseMatrix<f64>) -> bool {
    m.is_unitary(UNITARITY_TOLERANCE)
}
