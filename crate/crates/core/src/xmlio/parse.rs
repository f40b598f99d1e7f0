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

use super::*;
use crate::model::*;
use roxmltree::{Document, Node};
use std::collections::BTreeMap;

type El<'a, 'i> = Node<'a, 'i>;

struct Reader<'s> {
    src: &'s str,
    diags: Vec<ParseDiagnostic>,
}

/// Parses a QIS-XML instance document.
///
/// Structural problems are reported as diagnostics and parsing continues;
/// only malformed XML or a foreign root namespace abort.
pub fn parse_instance(text: &str) -> Result<(Instance, Vec<ParseDiagnostic>), XmlError> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    let doc = Document::parse_with_options(text, opts).map_err(|e| {
        let pos = e.pos();
        XmlError::NotWellFormed {
            line: pos.row,
            col: pos.col,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    let ns = root.tag_name().namespace().unwrap_or("");
    if ns != NS_INSTANCE {
        return Err(XmlError::WrongRootNamespace { found: ns.to_string() });
    }
    let mut r = Reader {
        src: text,
        diags: Vec::new(),
    };
    let path = format!("/{}", root.tag_name().name());
    if root.tag_name().name() != "QIS" {
        r.error(&path, format!("root element must be `QIS`, found `{}`", root.tag_name().name()));
    }
    let inst = r.instance(root, &path);
    Ok((inst, r.diags))
}

fn is(node: &El, ns: &str, name: &str) -> bool {
    node.is_element() && node.tag_name().namespace() == Some(ns) && node.tag_name().name() == name
}

fn known_ns(node: &El) -> bool {
    matches!(
        node.tag_name().namespace(),
        Some(NS_INSTANCE | NS_GATE | NS_CIRCUIT | NS_PROGRAM | NS_REUSABLE)
    )
}

fn text_of(node: El) -> String {
    node.descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect::<String>()
        .trim()
        .to_string()
}

/// Child elements paired with their element path.
fn children<'a, 'i>(node: El<'a, 'i>, path: &str) -> Vec<(El<'a, 'i>, String)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    node.children()
        .filter(|n| n.is_element())
        .map(|n| {
            let name = n.tag_name().name();
            let k = counts.entry(name).or_insert(0);
            *k += 1;
            (n, format!("{path}/{name}[{k}]"))
        })
        .collect()
}

impl<'s> Reader<'s> {
    fn error(&mut self, path: &str, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            severity: Severity::Error,
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn warn(&mut self, path: &str, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            severity: Severity::Warning,
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn unknown(&mut self, node: &El, path: &str) {
        if known_ns(node) {
            self.warn(path, format!("unknown element `{}` skipped", node.tag_name().name()));
        }
    }

    fn opaque(&self, node: El) -> OpaqueXml {
        OpaqueXml(self.src[node.range()].to_string())
    }

    fn attr_usize(&mut self, node: El, path: &str, name: &str) -> Option<usize> {
        let raw = node.attribute(name)?;
        match raw.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Some(v),
            _ => {
                self.error(path, format!("attribute `{name}` must be a positive integer, found `{raw}`"));
                None
            }
        }
    }

    fn required_usize(&mut self, node: El, path: &str, name: &str) -> usize {
        if node.attribute(name).is_none() {
            self.error(path, format!("missing attribute `{name}`"));
            return 1;
        }
        self.attr_usize(node, path, name).unwrap_or(1)
    }

    fn attr_f64(&mut self, node: El, path: &str, name: &str) -> f64 {
        match node.attribute(name) {
            None => 0.0,
            Some(raw) => match raw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    self.error(path, format!("attribute `{name}` is not a finite number: `{raw}`"));
                    0.0
                }
            },
        }
    }

    fn text_usize(&mut self, node: El, path: &str) -> usize {
        let t = text_of(node);
        match t.parse::<usize>() {
            Ok(v) if v >= 1 => v,
            _ => {
                self.error(path, format!("expected a positive 1-based index, found `{t}`"));
                1
            }
        }
    }

    fn complex(&mut self, node: El, path: &str) -> ComplexValue {
        let mut v = ComplexValue::new(self.attr_f64(node, path, "r"), self.attr_f64(node, path, "i"));
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Symbolic") {
                let expression = text_of(child);
                if expression.is_empty() {
                    self.error(&cpath, "empty symbolic expression");
                    continue;
                }
                v.symbolic.push(Symbolic {
                    syntax: child.attribute("syntax").map(str::to_string),
                    expression,
                });
            } else {
                self.unknown(&child, &cpath);
            }
        }
        v
    }

    fn identification(&mut self, node: El, path: &str) -> Identification {
        let mut ident = Identification::default();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "ID") {
                ident.id = text_of(child);
            } else if is(&child, NS_REUSABLE, "Agency") {
                ident.agency = Some(text_of(child));
            } else if is(&child, NS_REUSABLE, "Version") {
                ident.version = Some(text_of(child));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        if ident.id.is_empty() {
            self.error(path, "Identification requires a non-empty ID");
        }
        ident
    }

    fn reference(&mut self, node: El, path: &str) -> Reference {
        let mut r = Reference {
            uri: node.attribute("uri").map(str::to_string),
            ..Reference::default()
        };
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "ID") {
                r.id = text_of(child);
            } else if is(&child, NS_REUSABLE, "Agency") {
                r.agency = Some(text_of(child));
            } else if is(&child, NS_REUSABLE, "Version") {
                r.version = Some(text_of(child));
            } else if is(&child, NS_REUSABLE, "LibraryID") {
                r.library_id = Some(text_of(child));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        if r.id.is_empty() {
            self.error(path, "reference requires a non-empty ID");
        }
        r
    }

    fn port(&mut self, node: El, path: &str) -> Port {
        let mut p = Port::default();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Name") {
                p.name = text_of(child);
            } else if is(&child, NS_REUSABLE, "Description") {
                p.description = Some(text_of(child));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        p
    }

    fn instance(&mut self, root: El, path: &str) -> Instance {
        let mut inst = Instance::default();
        for (child, cpath) in children(root, path) {
            if is(&child, NS_GATE, "GateLibrary") {
                let lib = self.library(child, &cpath, NS_GATE, |r, n, ns, p| {
                    is(n, ns, "Gate").then(|| r.gate(*n, p))
                });
                inst.gate_libraries.push(lib);
            } else if is(&child, NS_CIRCUIT, "CircuitLibrary") {
                let lib = self.library(child, &cpath, NS_CIRCUIT, |r, n, ns, p| {
                    if is(n, ns, "Circuit") {
                        Some(CircuitMember::Circuit(r.circuit(*n, p, true)))
                    } else if is(n, ns, "GateEquivalentCircuit") {
                        Some(CircuitMember::Equivalent(r.equivalent(*n, p)))
                    } else {
                        None
                    }
                });
                inst.circuit_libraries.push(lib);
            } else if is(&child, NS_PROGRAM, "ProgramLibrary") {
                let lib = self.library(child, &cpath, NS_PROGRAM, |r, n, ns, p| {
                    is(n, ns, "Program").then(|| r.program(*n, p))
                });
                inst.program_libraries.push(lib);
            } else if is(&child, NS_INSTANCE, "LibraryRef") {
                let r = self.reference(child, &cpath);
                inst.external_library_refs.push(r);
            } else {
                self.unknown(&child, &cpath);
            }
        }
        inst
    }

    fn library<M>(
        &mut self,
        node: El,
        path: &str,
        ns: &str,
        mut member: impl FnMut(&mut Self, &El, &str, &str) -> Option<M>,
    ) -> Library<M> {
        let mut ident = None;
        let mut name = None;
        let mut members = Vec::new();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Identification") {
                ident = Some(self.identification(child, &cpath));
            } else if is(&child, ns, "Name") {
                name = Some(text_of(child));
            } else if let Some(m) = member(self, &child, ns, &cpath) {
                members.push(m);
            } else {
                self.unknown(&child, &cpath);
            }
        }
        let identification = ident.unwrap_or_else(|| {
            self.error(path, "library is missing its Identification");
            Identification::default()
        });
        Library {
            identification,
            name,
            members,
        }
    }

    fn gate(&mut self, node: El, path: &str) -> Gate {
        let mut ident = None;
        let mut name = None;
        let mut gate = Gate::new("", "", SparseUnitary::new(1));
        let mut transformation = None;
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Identification") {
                ident = Some(self.identification(child, &cpath));
            } else if is(&child, NS_GATE, "Name") {
                name = Some(text_of(child));
            } else if is(&child, NS_GATE, "Nickname") {
                gate.nickname = Some(text_of(child));
            } else if is(&child, NS_GATE, "Description") {
                gate.description = Some(text_of(child));
            } else if is(&child, NS_GATE, "Parameter") {
                let p = self.gate_parameter(child, &cpath);
                if gate.parameters.iter().any(|q| q.name == p.name) {
                    self.error(&cpath, format!("duplicate parameter `{}`", p.name));
                }
                gate.parameters.push(p);
            } else if is(&child, NS_GATE, "Input") {
                let p = self.port(child, &cpath);
                gate.inputs.push(p);
            } else if is(&child, NS_GATE, "Output") {
                let p = self.port(child, &cpath);
                gate.outputs.push(p);
            } else if is(&child, NS_REUSABLE, "Transformation") {
                transformation = Some(self.transformation(child, &cpath));
            } else if is(&child, NS_GATE, "Image") {
                gate.image = Some(self.opaque(child));
            } else if is(&child, NS_GATE, "ProprietaryData") {
                gate.proprietary_data = Some(self.opaque(child));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        match ident {
            Some(i) => gate.identification = i,
            None => self.error(path, "Gate is missing its Identification"),
        }
        match name {
            Some(n) if !n.is_empty() => gate.name = n,
            _ => self.error(path, "Gate is missing its Name"),
        }
        match transformation {
            Some(t) => gate.transformation = t,
            None => self.error(path, "Gate is missing its Transformation"),
        }
        gate
    }

    fn gate_parameter(&mut self, node: El, path: &str) -> GateParameter {
        let mut p = GateParameter {
            name: String::new(),
            default: None,
        };
        for (child, cpath) in children(node, path) {
            if is(&child, NS_GATE, "Name") {
                p.name = text_of(child);
            } else if is(&child, NS_GATE, "Default") {
                p.default = Some(self.complex(child, &cpath));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        if p.name.is_empty() {
            self.error(path, "Parameter requires a Name");
        }
        p
    }

    fn transformation(&mut self, node: El, path: &str) -> SparseUnitary {
        let size = self.required_usize(node, path, "size");
        let mut t = SparseUnitary::new(size);
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Multiplier") {
                t.multiplier = self.complex(child, &cpath);
            } else if is(&child, NS_REUSABLE, "Cell") {
                let row = self.required_usize(child, &cpath, "row");
                let col = self.required_usize(child, &cpath, "col");
                let v = self.complex(child, &cpath);
                if row > t.dim() || col > t.dim() {
                    self.error(&cpath, format!("cell ({row}, {col}) outside {0}x{0} matrix", t.dim()));
                }
                if t.cells.insert((row, col), v).is_some() {
                    self.error(&cpath, format!("duplicate cell ({row}, {col})"));
                }
            } else {
                self.unknown(&child, &cpath);
            }
        }
        t
    }

    fn circuit(&mut self, node: El, path: &str, strict: bool) -> Circuit {
        let size = self.required_usize(node, path, "size");
        let mut c = Circuit {
            identification: None,
            size,
            name: None,
            description: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            steps: Vec::new(),
            proprietary_data: None,
        };
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Identification") {
                c.identification = Some(self.identification(child, &cpath));
            } else if is(&child, NS_CIRCUIT, "Name") {
                c.name = Some(text_of(child));
            } else if is(&child, NS_CIRCUIT, "Description") {
                c.description = Some(text_of(child));
            } else if is(&child, NS_CIRCUIT, "Input") {
                let p = self.port(child, &cpath);
                c.inputs.push(p);
            } else if is(&child, NS_CIRCUIT, "Output") {
                let p = self.port(child, &cpath);
                c.outputs.push(p);
            } else if is(&child, NS_CIRCUIT, "Step") {
                let step = self.step(child, &cpath);
                c.steps.push(step);
            } else if is(&child, NS_CIRCUIT, "ProprietaryData") {
                c.proprietary_data = Some(self.opaque(child));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        if strict {
            if c.identification.is_none() {
                self.error(path, "Circuit is missing its Identification");
            }
            if c.name.as_deref().is_none_or(str::is_empty) {
                self.error(path, "Circuit is missing its Name");
            }
        }
        c
    }

    fn step(&mut self, node: El, path: &str) -> Step {
        let mut ops = Vec::new();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_CIRCUIT, "Operation") {
                if let Some(op) = self.operation(child, &cpath) {
                    ops.push(op);
                }
            } else {
                self.unknown(&child, &cpath);
            }
        }
        ops
    }

    fn map(&mut self, node: El, path: &str) -> Option<QubitMap> {
        let input = self.required_usize(node, path, "input");
        let qubit = self.attr_usize(node, path, "qubit");
        let value = node.attribute("value").map(str::trim);
        let source = match (qubit, value) {
            (Some(q), None) => MapSource::Qubit(q),
            (None, Some("0")) => MapSource::Fixed(0),
            (None, Some("1")) => MapSource::Fixed(1),
            (None, Some(v)) => {
                self.error(path, format!("fixed value must be 0 or 1, found `{v}`"));
                return None;
            }
            (Some(_), Some(_)) => {
                self.error(path, "Map may carry either `qubit` or `value`, not both");
                return None;
            }
            (None, None) => {
                if node.attribute("qubit").is_none() {
                    self.error(path, "Map requires `qubit` or `value`");
                }
                return None;
            }
        };
        Some(QubitMap { source, input })
    }

    fn operation(&mut self, node: El, path: &str) -> Option<Operation> {
        let reverse = match node.attribute("reverse").map(str::trim) {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(other) => {
                self.error(path, format!("attribute `reverse` must be a boolean, found `{other}`"));
                false
            }
        };
        let mut maps = Vec::new();
        let mut target = None;
        let mut bindings = BTreeMap::new();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_CIRCUIT, "Map") {
                if let Some(m) = self.map(child, &cpath) {
                    maps.push(m);
                }
            } else if is(&child, NS_CIRCUIT, "GateRef") {
                target = Some(OperationTarget::Gate(self.reference(child, &cpath)));
            } else if is(&child, NS_CIRCUIT, "CircuitRef") {
                target = Some(OperationTarget::Circuit(self.reference(child, &cpath)));
            } else if is(&child, NS_CIRCUIT, "Measurement") {
                let q = self.required_usize(child, &cpath, "qubit");
                target = Some(OperationTarget::Measurement(q));
            } else if is(&child, NS_CIRCUIT, "Parameter") {
                let name = child.attribute("name").unwrap_or("").to_string();
                if name.is_empty() {
                    self.error(&cpath, "parameter binding requires a `name`");
                }
                let v = self.complex(child, &cpath);
                bindings.insert(name, v);
            } else {
                self.unknown(&child, &cpath);
            }
        }
        match target {
            Some(target) => Some(Operation {
                maps,
                target,
                reverse,
                bindings,
            }),
            None => {
                self.error(path, "Operation needs a GateRef, CircuitRef or Measurement");
                None
            }
        }
    }

    fn equivalent(&mut self, node: El, path: &str) -> GateEquivalentCircuit {
        let mut gate_reference = None;
        let mut model = None;
        let mut circuit = None;
        let mut input_remapping = Vec::new();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_CIRCUIT, "GateReference") {
                gate_reference = Some(self.reference(child, &cpath));
            } else if is(&child, NS_CIRCUIT, "Model") {
                model = Some(text_of(child));
            } else if is(&child, NS_CIRCUIT, "Circuit") {
                circuit = Some(self.circuit(child, &cpath, false));
            } else if is(&child, NS_CIRCUIT, "Map") {
                if let Some(m) = self.map(child, &cpath) {
                    input_remapping.push(m);
                }
            } else {
                self.unknown(&child, &cpath);
            }
        }
        let gate_reference = gate_reference.unwrap_or_else(|| {
            self.error(path, "GateEquivalentCircuit requires a GateReference");
            Reference::default()
        });
        let circuit = circuit.unwrap_or_else(|| {
            self.error(path, "GateEquivalentCircuit requires a Circuit");
            Circuit {
                identification: None,
                size: 1,
                name: None,
                description: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
                steps: Vec::new(),
                proprietary_data: None,
            }
        });
        GateEquivalentCircuit {
            gate_reference,
            model,
            circuit,
            input_remapping,
        }
    }

    fn program(&mut self, node: El, path: &str) -> Program {
        let mut ident = None;
        let mut name = None;
        let mut memory = None;
        let mut global_registers = Vec::new();
        let mut steps = Vec::new();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Identification") {
                ident = Some(self.identification(child, &cpath));
            } else if is(&child, NS_PROGRAM, "Name") {
                name = Some(text_of(child));
            } else if is(&child, NS_PROGRAM, "Memory") {
                memory = Some(self.memory(child, &cpath));
            } else if is(&child, NS_PROGRAM, "Register") {
                let r = self.register(child, &cpath);
                global_registers.push(r);
            } else if is(&child, NS_PROGRAM, "Execute") {
                if let Some(s) = self.execute(child, &cpath) {
                    steps.push(s);
                }
            } else if is(&child, NS_PROGRAM, "Measure") {
                let reg = children(child, &cpath)
                    .into_iter()
                    .find(|(n, _)| is(n, NS_PROGRAM, "Register"))
                    .map(|(n, p)| self.register(n, &p));
                match reg {
                    Some(register) => steps.push(ProgramStep::Measure { register }),
                    None => self.error(&cpath, "Measure requires a Register"),
                }
            } else {
                self.unknown(&child, &cpath);
            }
        }
        let identification = ident.unwrap_or_else(|| {
            self.error(path, "Program is missing its Identification");
            Identification::default()
        });
        let (memory_size, memory_init) = memory.unwrap_or_else(|| {
            self.error(path, "Program is missing its Memory");
            (1, Vec::new())
        });
        Program {
            identification,
            name,
            memory_size,
            memory_init,
            global_registers,
            steps,
        }
    }

    fn memory(&mut self, node: El, path: &str) -> (usize, Vec<QubitInit>) {
        let size = self.required_usize(node, path, "size");
        let mut init = Vec::new();
        for (child, cpath) in children(node, path) {
            if is(&child, NS_PROGRAM, "Qubit") {
                let index = self.required_usize(child, &cpath, "index");
                let mut zero = ComplexValue::real(1.0);
                let mut one = ComplexValue::default();
                for (amp, apath) in children(child, &cpath) {
                    if is(&amp, NS_REUSABLE, "Zero") {
                        zero = self.complex(amp, &apath);
                    } else if is(&amp, NS_REUSABLE, "One") {
                        one = self.complex(amp, &apath);
                    } else {
                        self.unknown(&amp, &apath);
                    }
                }
                init.push(QubitInit { index, zero, one });
            } else {
                self.unknown(&child, &cpath);
            }
        }
        (size, init)
    }

    fn selector(&mut self, node: El, path: &str) -> Option<QubitSelector> {
        if is(&node, NS_PROGRAM, "QubitIndex") {
            Some(QubitSelector::Index(self.text_usize(node, path)))
        } else if is(&node, NS_PROGRAM, "QubitRange") {
            let mut start = None;
            let mut end = None;
            for (child, cpath) in children(node, path) {
                if is(&child, NS_PROGRAM, "StartQubit") {
                    start = Some(self.text_usize(child, &cpath));
                } else if is(&child, NS_PROGRAM, "EndQubit") {
                    end = Some(self.text_usize(child, &cpath));
                } else {
                    self.unknown(&child, &cpath);
                }
            }
            match (start, end) {
                (Some(start), Some(end)) => Some(QubitSelector::Range { start, end }),
                _ => {
                    self.error(path, "QubitRange requires StartQubit and EndQubit");
                    None
                }
            }
        } else if is(&node, NS_PROGRAM, "RegisterReference") {
            Some(QubitSelector::Register(self.reference(node, path)))
        } else {
            None
        }
    }

    fn register(&mut self, node: El, path: &str) -> RegisterSpec {
        let size = self.required_usize(node, path, "size");
        let mut reg = RegisterSpec::whole(size);
        for (child, cpath) in children(node, path) {
            if is(&child, NS_REUSABLE, "Identification") {
                reg.identification = Some(self.identification(child, &cpath));
            } else if is(&child, NS_PROGRAM, "Prepare") {
                for (set, spath) in children(child, &cpath) {
                    if is(&set, NS_PROGRAM, "QubitSet") {
                        let qs = self.qubit_set(set, &spath);
                        reg.prepare.push(qs);
                    } else {
                        self.unknown(&set, &spath);
                    }
                }
            } else if let Some(sel) = self.selector(child, &cpath) {
                reg.selectors.push(sel);
            } else {
                self.unknown(&child, &cpath);
            }
        }
        reg
    }

    fn qubit_set(&mut self, node: El, path: &str) -> QubitSetSpec {
        let mut targets = Vec::new();
        let mut value = None;
        for (child, cpath) in children(node, path) {
            if is(&child, NS_PROGRAM, "Value") {
                value = Some(self.complex(child, &cpath));
            } else if is(&child, NS_PROGRAM, "RegisterReference") {
                self.error(&cpath, "QubitSet selects register-relative indices only");
            } else if let Some(sel) = self.selector(child, &cpath) {
                targets.push(sel);
            } else {
                self.unknown(&child, &cpath);
            }
        }
        QubitSetSpec {
            targets,
            value: value.unwrap_or_default(),
        }
    }

    fn execute(&mut self, node: El, path: &str) -> Option<ProgramStep> {
        let mut register = None;
        let mut body = None;
        for (child, cpath) in children(node, path) {
            if is(&child, NS_PROGRAM, "Register") {
                if register.is_some() {
                    self.error(&cpath, "Execute holds exactly one Register");
                }
                register = Some(self.register(child, &cpath));
            } else if is(&child, NS_CIRCUIT, "Circuit") {
                if body.is_some() {
                    self.error(&cpath, "Execute holds exactly one circuit");
                }
                body = Some(ExecuteBody::Inline(Box::new(self.circuit(child, &cpath, true))));
            } else if is(&child, NS_PROGRAM, "CircuitRef") {
                if body.is_some() {
                    self.error(&cpath, "Execute holds exactly one circuit");
                }
                body = Some(ExecuteBody::Reference(self.reference(child, &cpath)));
            } else if is(&child, NS_PROGRAM, "Program") || is(&child, NS_PROGRAM, "ProgramRef") {
                body = Some(ExecuteBody::Subprogram(self.opaque(child)));
            } else {
                self.unknown(&child, &cpath);
            }
        }
        match (register, body) {
            (Some(register), Some(body)) => Some(ProgramStep::Execute { register, body }),
            (None, _) => {
                self.error(path, "Execute requires a Register");
                None
            }
            (_, None) => {
                self.error(path, "Execute requires a Circuit or CircuitRef");
                None
            }
        }
    }
}
