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

//! SVG drawings of gates and circuits.
//!
//! Only `line`, `rect`, `circle`, `text` and `g` with `translate` are
//! emitted. Circuits get one horizontal wire per qubit and one 50-pixel
//! column per step.

use crate::model::*;
use crate::resolver::{ResolutionContext, ResolveError};
use crate::xmlio::XmlWriter;

pub const SVG_NS: &str = "http://www.w3.org/2000/svg";

const STROKE: &str = "stroke:black;stroke-width:1;stroke-opacity:1;";
const BOX: &str = "opacity:1; fill:none; stroke:black; stroke-width:1; stroke-opacity:1;";
const LABEL: &str = "font-size:30px; font-weight:bold;";
const SMALL: &str = "font-size:14px;";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutGrid {
    pub cell_width: f64,
    pub cell_height: f64,
    /// Room left of the first column for wire labels.
    pub margin: f64,
}

impl Default for LayoutGrid {
    fn default() -> Self {
        Self {
            cell_width: 50.0,
            cell_height: 60.0,
            margin: 40.0,
        }
    }
}

impl LayoutGrid {
    /// Vertical centre of qubit `q`'s wire.
    pub fn wire_y(&self, q: usize) -> f64 {
        (q as f64 - 1.0) * self.cell_height + self.cell_height / 2.0
    }

    /// Horizontal centre of step `s` (1-based).
    pub fn column_x(&self, s: usize) -> f64 {
        self.margin + (s as f64 - 0.5) * self.cell_width
    }
}

fn n(v: f64) -> String {
    format!("{v}")
}

fn line(w: &mut XmlWriter, x1: f64, y1: f64, x2: f64, y2: f64) {
    w.empty(
        "line",
        &[
            ("x1", n(x1)),
            ("y1", n(y1)),
            ("x2", n(x2)),
            ("y2", n(y2)),
            ("style", STROKE.into()),
        ],
    );
}

fn rect(w: &mut XmlWriter, x: f64, y: f64, width: f64, height: f64, style: &str) {
    w.empty(
        "rect",
        &[
            ("x", n(x)),
            ("y", n(y)),
            ("width", n(width)),
            ("height", n(height)),
            ("style", style.into()),
        ],
    );
}

fn text(w: &mut XmlWriter, x: f64, y: f64, style: &str, s: &str) {
    w.text("text", &[("x", n(x)), ("y", n(y)), ("style", style.into())], s);
}

fn circle(w: &mut XmlWriter, cx: f64, cy: f64, r: f64, fill: &str) {
    w.empty(
        "circle",
        &[
            ("cx", n(cx)),
            ("cy", n(cy)),
            ("r", n(r)),
            ("style", format!("fill:{fill}; {STROKE}")),
        ],
    );
}

fn translate(x: f64, y: f64) -> (&'static str, String) {
    ("transform", format!("translate({},{})", n(x), n(y)))
}

/// The <g> body of an X target: circle with a cross.
fn target(w: &mut XmlWriter) {
    circle(w, 0.0, 0.0, 12.0, "none");
    w.open("g", &[("class", "cross".into())]);
    line(w, -12.0, 0.0, 12.0, 0.0);
    line(w, 0.0, -12.0, 0.0, 12.0);
    w.close("g");
}

/// Box with a text label; `x` is approximately centred.
fn labelled_box(w: &mut XmlWriter, top: f64, height: f64, label: &str) {
    rect(w, -20.0, top, 40.0, height, BOX);
    let size = if label.chars().count() > 2 { SMALL } else { LABEL };
    let x = if label.chars().count() > 2 { -18.0 } else { -11.0 * label.chars().count() as f64 };
    text(w, x, top + height / 2.0 + 10.0, size, label);
}

pub fn gate_label(g: &Gate) -> String {
    match g.nickname.as_deref() {
        Some(nick) if !nick.is_empty() && nick.chars().count() <= 3 => nick.to_string(),
        _ => g.identification.id.clone(),
    }
}

/// A 50x60 tile per gate input: stubs on both sides of a 40-pixel box,
/// or the target symbol for X.
pub fn render_gate_glyph(g: &Gate) -> String {
    let k = g.size().max(1);
    let h = 60.0 * k as f64;
    let mut w = XmlWriter::new();
    w.open(
        "svg",
        &[("xmlns", SVG_NS.into()), ("width", "50".into()), ("height", n(h))],
    );
    w.open("g", &[translate(25.0, 25.0)]);
    if g.identification.id == "X" {
        line(&mut w, -25.0, 0.0, -12.0, 0.0);
        target(&mut w);
        line(&mut w, 12.0, 0.0, 25.0, 0.0);
    } else {
        for i in 0..k {
            let y = 60.0 * i as f64;
            line(&mut w, -25.0, y, -20.0, y);
        }
        labelled_box(&mut w, -20.0, h - 20.0, &gate_label(g));
        for i in 0..k {
            let y = 60.0 * i as f64;
            line(&mut w, 20.0, y, 25.0, y);
        }
    }
    w.close("g");
    w.close("svg");
    w.finish()
}

/// `(controls, body)` for gates drawn with control dots.
fn controlled(id: &str) -> Option<(usize, &'static str)> {
    Some(match id {
        "C-NOT" => (1, "+"),
        "TOFFOLI" => (2, "+"),
        "C-Z" => (1, "Z"),
        "C-T" => (1, "T"),
        "C-PHASE" => (1, "S"),
        _ => return None,
    })
}

struct Inputs {
    /// Wire of every gate input, `None` for fixed-value inputs.
    wires: Vec<Option<usize>>,
    fixed: Vec<(usize, u8)>,
}

fn inputs(op: &Operation, size: usize) -> Inputs {
    let mut wires = vec![None; size];
    let mut fixed = Vec::new();
    for m in &op.maps {
        match m.source {
            MapSource::Qubit(q) if (1..=size).contains(&m.input) => wires[m.input - 1] = Some(q),
            MapSource::Fixed(v) => fixed.push((m.input, v)),
            _ => {}
        }
    }
    Inputs { wires, fixed }
}

fn operation(w: &mut XmlWriter, grid: &LayoutGrid, op: &Operation, ctx: &ResolutionContext) -> Result<(), ResolveError> {
    let (label, size, controls_body) = match &op.target {
        OperationTarget::Measurement(q) => {
            let y = grid.wire_y(*q);
            rect(w, -20.0, y - 20.0, 40.0, 40.0, BOX);
            line(w, 0.0, y + 12.0, 12.0, y - 12.0);
            text(w, -18.0, y + 16.0, SMALL, "M");
            return Ok(());
        }
        OperationTarget::Gate(r) => {
            let g = ctx.resolve_gate(r)?;
            (gate_label(g), g.size(), controlled(&g.identification.id))
        }
        OperationTarget::Circuit(r) => {
            let c = ctx.resolve_circuit(r)?;
            (c.id().to_string(), c.size, None)
        }
    };
    let label = if op.reverse { format!("{label}†") } else { label };
    let ins = inputs(op, size);
    let rows: Vec<f64> = ins.wires.iter().flatten().map(|&q| grid.wire_y(q)).collect();
    let top = rows.iter().cloned().fold(f64::INFINITY, f64::min);
    let bottom = rows.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match controls_body {
        Some((nc, body)) if ins.wires.iter().all(Option::is_some) && !rows.is_empty() => {
            line(w, 0.0, top, 0.0, bottom);
            for q in ins.wires[..nc].iter().flatten() {
                circle(w, 0.0, grid.wire_y(*q), 5.0, "black");
            }
            for q in ins.wires[nc..].iter().flatten() {
                let y = grid.wire_y(*q);
                w.open("g", &[translate(0.0, y)]);
                if body == "+" {
                    target(w);
                } else {
                    labelled_box(w, -20.0, 40.0, body);
                }
                w.close("g");
            }
        }
        _ if !rows.is_empty() => {
            labelled_box(w, top - 20.0, bottom - top + 40.0, &label);
        }
        _ => {
            let y = grid.wire_y(1);
            labelled_box(w, y - 20.0, 40.0, &label);
        }
    }
    let anchor = if rows.is_empty() { grid.wire_y(1) } else { top };
    for (k, (input, v)) in ins.fixed.iter().enumerate() {
        // Fixed inputs enter from above the gate.
        let y = anchor - 24.0 - 12.0 * k as f64;
        line(w, -20.0, y, -8.0, y);
        text(w, -30.0, y + 5.0, SMALL, &format!("{v}"));
        let _ = input;
    }
    Ok(())
}

/// Draws `c` with the default grid.
pub fn render_circuit(c: &Circuit, ctx: &ResolutionContext) -> Result<String, ResolveError> {
    render_circuit_with(c, ctx, &LayoutGrid::default())
}

pub fn render_circuit_with(c: &Circuit, ctx: &ResolutionContext, grid: &LayoutGrid) -> Result<String, ResolveError> {
    let width = grid.margin + grid.cell_width * c.steps.len() as f64 + grid.cell_width / 2.0;
    let height = grid.cell_height * c.size.max(1) as f64;
    let mut w = XmlWriter::new();
    w.open(
        "svg",
        &[("xmlns", SVG_NS.into()), ("width", n(width)), ("height", n(height))],
    );
    for q in 1..=c.size {
        let y = grid.wire_y(q);
        w.open("g", &[("class", "wire".into())]);
        text(&mut w, 2.0, y + 5.0, SMALL, &format!("q{q}"));
        line(&mut w, grid.margin - 10.0, y, width, y);
        w.close("g");
    }
    for (s, step) in c.steps.iter().enumerate() {
        let x = grid.column_x(s + 1);
        for op in step {
            w.open("g", &[("class", "gate".into()), translate(x, 0.0)]);
            operation(&mut w, grid, op, ctx)?;
            w.close("g");
        }
    }
    w.close("svg");
    Ok(w.finish())
}
