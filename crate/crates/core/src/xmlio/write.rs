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

use super::NAMESPACES;
use crate::model::*;
use std::fmt::Write as _;

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Indenting element writer shared by the QIS-XML, QML and SVG emitters.
pub(crate) struct XmlWriter {
    out: String,
    depth: usize,
}

impl XmlWriter {
    pub(crate) fn new() -> Self {
        Self {
            out: String::new(),
            depth: 0,
        }
    }

    pub(crate) fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn tag(name: &str, attrs: &[(&str, String)]) -> String {
        let mut s = format!("<{name}");
        for (k, v) in attrs {
            let _ = write!(s, " {k}=\"{}\"", escape(v));
        }
        s
    }

    pub(crate) fn open(&mut self, name: &str, attrs: &[(&str, String)]) {
        let t = Self::tag(name, attrs);
        self.line(&format!("{t}>"));
        self.depth += 1;
    }

    pub(crate) fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.line(&format!("</{name}>"));
    }

    pub(crate) fn empty(&mut self, name: &str, attrs: &[(&str, String)]) {
        let t = Self::tag(name, attrs);
        self.line(&format!("{t}/>"));
    }

    pub(crate) fn text(&mut self, name: &str, attrs: &[(&str, String)], text: &str) {
        let t = Self::tag(name, attrs);
        self.line(&format!("{t}>{}</{name}>", escape(text)));
    }

    pub(crate) fn raw(&mut self, fragment: &str) {
        self.line(fragment);
    }

    pub(crate) fn finish(self) -> String {
        self.out
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn complex_attrs(v: &ComplexValue) -> Vec<(&'static str, String)> {
    let mut attrs = Vec::new();
    if v.re != 0.0 {
        attrs.push(("r", num(v.re)));
    }
    if v.im != 0.0 {
        attrs.push(("i", num(v.im)));
    }
    attrs
}

fn complex(w: &mut XmlWriter, name: &str, mut attrs: Vec<(&str, String)>, v: &ComplexValue) {
    attrs.extend(complex_attrs(v));
    if v.symbolic.is_empty() {
        w.empty(name, &attrs);
        return;
    }
    w.open(name, &attrs);
    for s in &v.symbolic {
        let sattrs: Vec<(&str, String)> = s.syntax.iter().map(|x| ("syntax", x.clone())).collect();
        w.text("r:Symbolic", &sattrs, &s.expression);
    }
    w.close(name);
}

fn identification(w: &mut XmlWriter, ident: &Identification) {
    w.open("r:Identification", &[]);
    w.text("r:ID", &[], &ident.id);
    if let Some(a) = &ident.agency {
        w.text("r:Agency", &[], a);
    }
    if let Some(v) = &ident.version {
        w.text("r:Version", &[], v);
    }
    w.close("r:Identification");
}

fn reference(w: &mut XmlWriter, name: &str, r: &Reference) {
    let attrs: Vec<(&str, String)> = r.uri.iter().map(|u| ("uri", u.clone())).collect();
    w.open(name, &attrs);
    w.text("r:ID", &[], &r.id);
    if let Some(a) = &r.agency {
        w.text("r:Agency", &[], a);
    }
    if let Some(v) = &r.version {
        w.text("r:Version", &[], v);
    }
    if let Some(l) = &r.library_id {
        w.text("r:LibraryID", &[], l);
    }
    w.close(name);
}

fn port(w: &mut XmlWriter, name: &str, p: &Port) {
    w.open(name, &[]);
    w.text("r:Name", &[], &p.name);
    if let Some(d) = &p.description {
        w.text("r:Description", &[], d);
    }
    w.close(name);
}

fn transformation(w: &mut XmlWriter, t: &SparseUnitary) {
    w.open("r:Transformation", &[("size", t.size.to_string())]);
    if !t.multiplier.is_one() {
        complex(w, "r:Multiplier", Vec::new(), &t.multiplier);
    }
    for (&(row, col), v) in &t.cells {
        complex(w, "r:Cell", vec![("row", row.to_string()), ("col", col.to_string())], v);
    }
    w.close("r:Transformation");
}

fn gate(w: &mut XmlWriter, g: &Gate) {
    w.open("g:Gate", &[]);
    identification(w, &g.identification);
    w.text("g:Name", &[], &g.name);
    if let Some(n) = &g.nickname {
        w.text("g:Nickname", &[], n);
    }
    if let Some(d) = &g.description {
        w.text("g:Description", &[], d);
    }
    for p in &g.parameters {
        w.open("g:Parameter", &[]);
        w.text("g:Name", &[], &p.name);
        if let Some(d) = &p.default {
            complex(w, "g:Default", Vec::new(), d);
        }
        w.close("g:Parameter");
    }
    for p in &g.inputs {
        port(w, "g:Input", p);
    }
    for p in &g.outputs {
        port(w, "g:Output", p);
    }
    transformation(w, &g.transformation);
    if let Some(img) = &g.image {
        w.raw(&img.0);
    }
    if let Some(pd) = &g.proprietary_data {
        w.raw(&pd.0);
    }
    w.close("g:Gate");
}

fn map(w: &mut XmlWriter, m: &QubitMap) {
    match m.source {
        MapSource::Qubit(q) => w.empty("c:Map", &[("qubit", q.to_string()), ("input", m.input.to_string())]),
        MapSource::Fixed(v) => w.empty("c:Map", &[("input", m.input.to_string()), ("value", v.to_string())]),
    }
}

fn operation(w: &mut XmlWriter, op: &Operation) {
    let attrs: Vec<(&str, String)> = if op.reverse {
        vec![("reverse", "true".into())]
    } else {
        Vec::new()
    };
    w.open("c:Operation", &attrs);
    for m in &op.maps {
        map(w, m);
    }
    match &op.target {
        OperationTarget::Gate(r) => reference(w, "c:GateRef", r),
        OperationTarget::Circuit(r) => reference(w, "c:CircuitRef", r),
        OperationTarget::Measurement(q) => w.empty("c:Measurement", &[("qubit", q.to_string())]),
    }
    for (name, v) in &op.bindings {
        complex(w, "c:Parameter", vec![("name", name.clone())], v);
    }
    w.close("c:Operation");
}

pub(crate) fn circuit(w: &mut XmlWriter, c: &Circuit) {
    w.open("c:Circuit", &[("size", c.size.to_string())]);
    if let Some(i) = &c.identification {
        identification(w, i);
    }
    if let Some(n) = &c.name {
        w.text("c:Name", &[], n);
    }
    if let Some(d) = &c.description {
        w.text("c:Description", &[], d);
    }
    for p in &c.inputs {
        port(w, "c:Input", p);
    }
    for p in &c.outputs {
        port(w, "c:Output", p);
    }
    for step in &c.steps {
        w.open("c:Step", &[]);
        for op in step {
            operation(w, op);
        }
        w.close("c:Step");
    }
    if let Some(pd) = &c.proprietary_data {
        w.raw(&pd.0);
    }
    w.close("c:Circuit");
}

fn selector(w: &mut XmlWriter, s: &QubitSelector) {
    match s {
        QubitSelector::Index(i) => w.text("p:QubitIndex", &[], &i.to_string()),
        QubitSelector::Range { start, end } => {
            w.open("p:QubitRange", &[]);
            w.text("p:StartQubit", &[], &start.to_string());
            w.text("p:EndQubit", &[], &end.to_string());
            w.close("p:QubitRange");
        }
        QubitSelector::Register(r) => reference(w, "p:RegisterReference", r),
    }
}

fn register(w: &mut XmlWriter, reg: &RegisterSpec) {
    let attrs = [("size", reg.size.to_string())];
    if reg.identification.is_none() && reg.selectors.is_empty() && reg.prepare.is_empty() {
        w.empty("p:Register", &attrs);
        return;
    }
    w.open("p:Register", &attrs);
    if let Some(i) = &reg.identification {
        identification(w, i);
    }
    for s in &reg.selectors {
        selector(w, s);
    }
    if !reg.prepare.is_empty() {
        w.open("p:Prepare", &[]);
        for set in &reg.prepare {
            w.open("p:QubitSet", &[]);
            for t in &set.targets {
                selector(w, t);
            }
            complex(w, "p:Value", Vec::new(), &set.value);
            w.close("p:QubitSet");
        }
        w.close("p:Prepare");
    }
    w.close("p:Register");
}

fn program(w: &mut XmlWriter, p: &Program) {
    w.open("p:Program", &[]);
    identification(w, &p.identification);
    if let Some(n) = &p.name {
        w.text("p:Name", &[], n);
    }
    let mattrs = [("size", p.memory_size.to_string())];
    if p.memory_init.is_empty() {
        w.empty("p:Memory", &mattrs);
    } else {
        w.open("p:Memory", &mattrs);
        for q in &p.memory_init {
            w.open("p:Qubit", &[("index", q.index.to_string())]);
            complex(w, "r:Zero", Vec::new(), &q.zero);
            complex(w, "r:One", Vec::new(), &q.one);
            w.close("p:Qubit");
        }
        w.close("p:Memory");
    }
    for r in &p.global_registers {
        register(w, r);
    }
    for step in &p.steps {
        match step {
            ProgramStep::Execute { register: reg, body } => {
                w.open("p:Execute", &[]);
                register(w, reg);
                match body {
                    ExecuteBody::Inline(c) => circuit(w, c),
                    ExecuteBody::Reference(r) => reference(w, "p:CircuitRef", r),
                    ExecuteBody::Subprogram(x) => w.raw(&x.0),
                }
                w.close("p:Execute");
            }
            ProgramStep::Measure { register: reg } => {
                w.open("p:Measure", &[]);
                register(w, reg);
                w.close("p:Measure");
            }
        }
    }
    w.close("p:Program");
}

fn library_head<M>(w: &mut XmlWriter, name: &str, lib: &Library<M>, name_tag: &str) {
    w.open(name, &[]);
    identification(w, &lib.identification);
    if let Some(n) = &lib.name {
        w.text(name_tag, &[], n);
    }
}

/// Serializes an instance deterministically: fixed attribute order, two-space
/// indentation, cells sorted by `(row, col)`, default-valued numeric
/// attributes omitted.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut w = XmlWriter::new();
    w.line(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let attrs: Vec<(&str, String)> = NAMESPACES
        .iter()
        .map(|(p, ns)| (xmlns_attr(p), ns.to_string()))
        .collect();
    let empty = inst.gate_libraries.is_empty()
        && inst.circuit_libraries.is_empty()
        && inst.program_libraries.is_empty()
        && inst.external_library_refs.is_empty();
    if empty {
        w.empty("i:QIS", &attrs);
        return w.finish();
    }
    w.open("i:QIS", &attrs);
    for r in &inst.external_library_refs {
        reference(&mut w, "i:LibraryRef", r);
    }
    for lib in &inst.gate_libraries {
        library_head(&mut w, "g:GateLibrary", lib, "g:Name");
        for g in &lib.members {
            gate(&mut w, g);
        }
        w.close("g:GateLibrary");
    }
    for lib in &inst.circuit_libraries {
        library_head(&mut w, "c:CircuitLibrary", lib, "c:Name");
        for m in &lib.members {
            match m {
                CircuitMember::Circuit(c) => circuit(&mut w, c),
                CircuitMember::Equivalent(e) => {
                    w.open("c:GateEquivalentCircuit", &[]);
                    reference(&mut w, "c:GateReference", &e.gate_reference);
                    if let Some(model) = &e.model {
                        w.text("c:Model", &[], model);
                    }
                    circuit(&mut w, &e.circuit);
                    for m in &e.input_remapping {
                        map(&mut w, m);
                    }
                    w.close("c:GateEquivalentCircuit");
                }
            }
        }
        w.close("c:CircuitLibrary");
    }
    for lib in &inst.program_libraries {
        library_head(&mut w, "p:ProgramLibrary", lib, "p:Name");
        for p in &lib.members {
            program(&mut w, p);
        }
        w.close("p:ProgramLibrary");
    }
    w.close("i:QIS");
    w.finish()
}

fn xmlns_attr(prefix: &str) -> &'static str {
    match prefix {
        "i" => "xmlns:i",
        "g" => "xmlns:g",
        "c" => "xmlns:c",
        "p" => "xmlns:p",
        _ => "xmlns:r",
    }
}
